// Desktop Arduino simulator: virtual clock, scripted input pins, write trace.
//
// Clock model (shared with the reference interpreter so traces diff
// byte-for-byte): every millis() call advances the clock by one tick and
// returns the new value; delay(ms) advances by ms; reads and writes do not
// advance time. When the clock would pass the horizon, the run unwinds
// cooperatively via juniper::horizon_reached so the trace still flushes.
//
// Configuration comes from the environment:
//   JUNIPER_TICK_MS     virtual milliseconds per millis() call (default 1)
//   JUNIPER_HORIZON_MS  stop once the clock would pass this (default: never)
//   JUNIPER_SCHEDULE    CSV `time_ms,pin,level` of scripted input levels
//   JUNIPER_TRACE       path for the CSV write trace (default: stdout)

#pragma once

#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#ifndef HIGH
#define LOW 0
#define HIGH 1
#define INPUT 0
#define OUTPUT 1
#define INPUT_PULLUP 2
#endif

namespace juniper {
namespace sim {

struct Event {
    long long time_ms;
    int pin;
    int level;
};

struct Device {
    long long clock = 0;
    long long tick = 1;
    long long horizon = -1; // negative: unbounded
    std::vector<Event> schedule;
    std::vector<Event> trace;
    std::map<int, int> modes;
    std::string trace_path;

    long long advance(long long amount) {
        long long nxt = clock + amount;
        if (horizon >= 0 && nxt > horizon) {
            throw juniper::horizon_reached{};
        }
        clock = nxt;
        return clock;
    }

    int read(int pin) {
        int level = 0;
        for (const Event& ev : schedule) {
            if (ev.time_ms > clock) {
                break;
            }
            if (ev.pin == pin) {
                level = ev.level;
            }
        }
        return level;
    }

    void write(int pin, int level) {
        auto it = modes.find(pin);
        if (it == modes.end() || it->second != OUTPUT) {
            fprintf(stderr,
                    "juniper-sim: warning: write to pin %d at %lld ms before "
                    "pinMode(OUTPUT)\n",
                    pin, clock);
        }
        trace.push_back(Event{clock, pin, level});
    }
};

inline Device& device() {
    static Device d;
    return d;
}

inline void load_schedule(const char* path) {
    FILE* fh = fopen(path, "r");
    if (!fh) {
        fprintf(stderr, "juniper-sim: cannot open schedule '%s'\n", path);
        exit(2);
    }
    char line[512];
    bool header = true;
    while (fgets(line, sizeof line, fh)) {
        if (header) {
            header = false;
            continue;
        }
        long long t;
        int pin, level;
        if (sscanf(line, "%lld,%d,%d", &t, &pin, &level) == 3) {
            device().schedule.push_back(Event{t, pin, level});
        }
    }
    fclose(fh);
    std::stable_sort(
        device().schedule.begin(), device().schedule.end(),
        [](const Event& a, const Event& b) { return a.time_ms < b.time_ms; });
}

} // namespace sim

inline void hal_init() {
    sim::Device& d = sim::device();
    if (const char* tick = getenv("JUNIPER_TICK_MS")) {
        d.tick = atoll(tick);
    }
    if (const char* horizon = getenv("JUNIPER_HORIZON_MS")) {
        d.horizon = atoll(horizon);
    }
    if (const char* trace = getenv("JUNIPER_TRACE")) {
        d.trace_path = trace;
    }
    const char* schedule = getenv("JUNIPER_SCHEDULE");
    if (schedule && *schedule) {
        sim::load_schedule(schedule);
    }
}

inline void hal_shutdown() {
    sim::Device& d = sim::device();
    FILE* out = stdout;
    if (!d.trace_path.empty()) {
        out = fopen(d.trace_path.c_str(), "w");
        if (!out) {
            fprintf(stderr, "juniper-sim: cannot write trace '%s'\n",
                    d.trace_path.c_str());
            exit(2);
        }
    }
    fprintf(out, "time_ms,pin,level\n");
    for (const sim::Event& r : d.trace) {
        fprintf(out, "%lld,%d,%d\n", r.time_ms, r.pin, r.level);
    }
    if (out != stdout) {
        fclose(out);
    }
}

} // namespace juniper

inline uint32_t millis() {
    juniper::sim::Device& d = juniper::sim::device();
    return (uint32_t) d.advance(d.tick);
}

inline void delay(uint32_t ms) {
    juniper::sim::device().advance((long long) ms);
}

inline void pinMode(uint8_t pin, uint8_t mode) {
    juniper::sim::device().modes[(int) pin] = (int) mode;
}

inline void digitalWrite(uint8_t pin, uint8_t value) {
    juniper::sim::device().write((int) pin, value ? 1 : 0);
}

inline uint8_t digitalRead(uint8_t pin) {
    return (uint8_t) juniper::sim::device().read((int) pin);
}
