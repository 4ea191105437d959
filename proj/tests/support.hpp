#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hsm/error.hpp"

namespace hsm::test {

// Collects warnings for the lifetime of the object.
class CaptureWarnings {
public:
    CaptureWarnings()
        : previous_(set_warning_sink([this](std::string_view m) { messages.emplace_back(m); }))
    {
    }
    ~CaptureWarnings() { set_warning_sink(previous_); }
    CaptureWarnings(const CaptureWarnings&) = delete;
    CaptureWarnings& operator=(const CaptureWarnings&) = delete;

    std::vector<std::string> messages;

private:
    WarningSink previous_;
};

} // namespace hsm::test
