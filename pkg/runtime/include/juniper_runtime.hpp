// Runtime support required by every compiled program.
//
// Provides: the Prelude::unit value type, the callable wrapper used for
// function-typed values, reference-counted cells (typed `refcell` backing
// `ref`, untyped `shared_ptr<void>` backing `pointer`), fixed-capacity
// arrays with integral capacity parameters, fixed-arity tuples, and the
// typed `quit` abort used as the non-exhaustive-match fallback.
//
// Define JUNIPER_SIM to pull in the desktop simulator (sim_hal.hpp), which
// implements the Arduino-style pin/clock surface against a virtual clock and
// a scripted schedule. Without it the surface is only declared, and an
// external environment (e.g. the Arduino core) must provide it.

#pragma once

#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>

#include <functional>
#include <type_traits>

namespace Prelude {

struct unit {
    bool operator==(unit) { return true; }
    bool operator!=(unit) { return false; }
};

} // namespace Prelude

namespace juniper {

template <typename Sig>
using function = std::function<Sig>;

struct quit_error {
    const char* message;
};

struct horizon_reached {};

// Exit status reported by run_program when a quit unwinds the run.
constexpr int QUIT_EXIT_STATUS = 42;

// Typed abort: the fallback alternative of every lowered `case`.
// Define JUNIPER_QUIT_USE_ABORT to turn it into a hard abort() instead of a
// catchable unwind.
template <typename T>
T quit() {
#ifdef JUNIPER_QUIT_USE_ABORT
    abort();
#else
    throw quit_error{"no pattern matched the value"};
#endif
}

// Signed division and modulo with wrap-around semantics at the type's
// minimum (INT_MIN / -1 wraps instead of trapping); results re-wrap to the
// operand width. Division by zero remains a fault, as in the interpreter.
inline int8_t idiv(int8_t a, int8_t b) {
    if (b == -1) { return (int8_t)(0 - (uint8_t)a); }
    return (int8_t)(a / b);
}
inline int16_t idiv(int16_t a, int16_t b) {
    if (b == -1) { return (int16_t)(0 - (uint16_t)a); }
    return (int16_t)(a / b);
}
inline int32_t idiv(int32_t a, int32_t b) {
    if (b == -1) { return (int32_t)(0 - (uint32_t)a); }
    return a / b;
}
inline int8_t imod(int8_t a, int8_t b) {
    if (b == -1) { return 0; }
    return (int8_t)(a % b);
}
inline int16_t imod(int16_t a, int16_t b) {
    if (b == -1) { return 0; }
    return (int16_t)(a % b);
}
inline int32_t imod(int32_t a, int32_t b) {
    if (b == -1) { return 0; }
    return a % b;
}

// Reference-counted shared cell owning one payload by value; backs `ref`.
// Copies share the cell; the payload is destroyed exactly when the last
// owner releases. Cycles are not collected.
template <typename T>
class refcell {
    struct block {
        T value;
        long count;
    };
    block* b;

    void release() {
        if (--b->count == 0) {
            delete b;
        }
    }

public:
    refcell() : b(new block{T(), 1}) {}
    explicit refcell(const T& v) : b(new block{v, 1}) {}
    refcell(const refcell& other) : b(other.b) { ++b->count; }
    refcell& operator=(const refcell& other) {
        if (b != other.b) {
            block* mine = b;
            b = other.b;
            ++b->count;
            if (--mine->count == 0) {
                delete mine;
            }
        }
        return *this;
    }
    ~refcell() { release(); }

    T get() const { return b->value; }
    void set(const T& v) { b->value = v; }
    long use_count() const { return b->count; }

    bool operator==(const refcell& rhs) const { return b->value == rhs.b->value; }
    bool operator!=(const refcell& rhs) const { return !(*this == rhs); }
};

// Untyped reference-counted pointer cell; backs the source `pointer` type
// and the `null` literal. The slot is retargeted with set() from inline C++.
// For T = void the pointee cannot be destroyed (no type information), which
// mirrors the documented limitation of the foreign-handle design; typed
// instantiations delete the pointee on the last release.
template <typename T>
class shared_ptr {
    struct block {
        T* ptr;
        long count;
    };
    block* b;

    void destroy(block* blk) {
        if constexpr (!std::is_void<T>::value) {
            delete blk->ptr;
        }
        delete blk;
    }

    void release() {
        if (--b->count == 0) {
            destroy(b);
        }
    }

public:
    shared_ptr() : b(new block{nullptr, 1}) {}
    explicit shared_ptr(T* p) : b(new block{p, 1}) {}
    shared_ptr(const shared_ptr& other) : b(other.b) { ++b->count; }
    shared_ptr& operator=(const shared_ptr& other) {
        if (b != other.b) {
            block* mine = b;
            b = other.b;
            ++b->count;
            if (--mine->count == 0) {
                destroy(mine);
            }
        }
        return *this;
    }
    ~shared_ptr() { release(); }

    void set(T* p) { b->ptr = p; }
    T* get() const { return b->ptr; }
    long use_count() const { return b->count; }

    bool operator==(const shared_ptr& rhs) const { return b->ptr == rhs.b->ptr; }
    bool operator!=(const shared_ptr& rhs) const { return !(*this == rhs); }
};

// Fixed-capacity array value type; the capacity is a compile-time integral
// template parameter and equality is element-wise.
template <typename T, int n>
struct array {
    T data[n];

    array() : data{} {}

    bool operator==(array rhs) {
        for (int i = 0; i < n; i++) {
            if (!(data[i] == rhs.data[i])) {
                return false;
            }
        }
        return true;
    }
    bool operator!=(array rhs) { return !(*this == rhs); }
};

// Fixed-arity tuple containers (aggregates, so braced construction keeps
// left-to-right evaluation of the element expressions).
template <typename T1, typename T2>
struct tuple2 {
    T1 e1; T2 e2;
    bool operator==(tuple2 rhs) { return e1 == rhs.e1 && e2 == rhs.e2; }
    bool operator!=(tuple2 rhs) { return !(*this == rhs); }
};

template <typename T1, typename T2, typename T3>
struct tuple3 {
    T1 e1; T2 e2; T3 e3;
    bool operator==(tuple3 rhs) {
        return e1 == rhs.e1 && e2 == rhs.e2 && e3 == rhs.e3;
    }
    bool operator!=(tuple3 rhs) { return !(*this == rhs); }
};

template <typename T1, typename T2, typename T3, typename T4>
struct tuple4 {
    T1 e1; T2 e2; T3 e3; T4 e4;
    bool operator==(tuple4 rhs) {
        return e1 == rhs.e1 && e2 == rhs.e2 && e3 == rhs.e3 && e4 == rhs.e4;
    }
    bool operator!=(tuple4 rhs) { return !(*this == rhs); }
};

template <typename T1, typename T2, typename T3, typename T4, typename T5>
struct tuple5 {
    T1 e1; T2 e2; T3 e3; T4 e4; T5 e5;
    bool operator==(tuple5 rhs) {
        return e1 == rhs.e1 && e2 == rhs.e2 && e3 == rhs.e3 && e4 == rhs.e4 &&
               e5 == rhs.e5;
    }
    bool operator!=(tuple5 rhs) { return !(*this == rhs); }
};

template <typename T1, typename T2, typename T3, typename T4, typename T5,
          typename T6>
struct tuple6 {
    T1 e1; T2 e2; T3 e3; T4 e4; T5 e5; T6 e6;
    bool operator==(tuple6 rhs) {
        return e1 == rhs.e1 && e2 == rhs.e2 && e3 == rhs.e3 && e4 == rhs.e4 &&
               e5 == rhs.e5 && e6 == rhs.e6;
    }
    bool operator!=(tuple6 rhs) { return !(*this == rhs); }
};

template <typename T1, typename T2, typename T3, typename T4, typename T5,
          typename T6, typename T7>
struct tuple7 {
    T1 e1; T2 e2; T3 e3; T4 e4; T5 e5; T6 e6; T7 e7;
    bool operator==(tuple7 rhs) {
        return e1 == rhs.e1 && e2 == rhs.e2 && e3 == rhs.e3 && e4 == rhs.e4 &&
               e5 == rhs.e5 && e6 == rhs.e6 && e7 == rhs.e7;
    }
    bool operator!=(tuple7 rhs) { return !(*this == rhs); }
};

template <typename T1, typename T2, typename T3, typename T4, typename T5,
          typename T6, typename T7, typename T8>
struct tuple8 {
    T1 e1; T2 e2; T3 e3; T4 e4; T5 e5; T6 e6; T7 e7; T8 e8;
    bool operator==(tuple8 rhs) {
        return e1 == rhs.e1 && e2 == rhs.e2 && e3 == rhs.e3 && e4 == rhs.e4 &&
               e5 == rhs.e5 && e6 == rhs.e6 && e7 == rhs.e7 && e8 == rhs.e8;
    }
    bool operator!=(tuple8 rhs) { return !(*this == rhs); }
};

} // namespace juniper

#ifdef JUNIPER_SIM
#include "sim_hal.hpp"
#else

#ifndef HIGH
#define LOW 0
#define HIGH 1
#define INPUT 0
#define OUTPUT 1
#define INPUT_PULLUP 2
#endif

extern uint32_t millis();
extern void delay(uint32_t ms);
extern void pinMode(uint8_t pin, uint8_t mode);
extern void digitalWrite(uint8_t pin, uint8_t value);
extern uint8_t digitalRead(uint8_t pin);

namespace juniper {
inline void hal_init() {}
inline void hal_shutdown() {}
} // namespace juniper

#endif // JUNIPER_SIM

namespace juniper {

// Entry-point wrapper emitted as the target main: initializes the platform,
// runs the program, converts a cooperative horizon stop into a clean exit
// and a quit into the distinguished status, and flushes the platform state.
template <typename F>
inline int run_program(F body) {
    hal_init();
    int status = 0;
    try {
        body();
    } catch (horizon_reached&) {
        status = 0;
    } catch (quit_error& q) {
        fprintf(stderr, "juniper: runtime quit: %s\n", q.message);
        status = QUIT_EXIT_STATUS;
    }
    hal_shutdown();
    return status;
}

} // namespace juniper
