#pragma once

#include <doctest.h>

#include <string>

// Runs `expr`, expecting `Type` with code `expected`.
#define CHECK_THROWS_CODE(expr, Type, expected)                     \
    do {                                                            \
        std::string caught_code_;                                   \
        try {                                                       \
            (void)(expr);                                           \
        } catch (const Type& e) {                                   \
            caught_code_ = e.code();                                \
        }                                                           \
        CHECK_MESSAGE(caught_code_ == (expected), "got code '" << caught_code_ << "'"); \
    } while (0)
