#include "hsm/error.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace hsm {
namespace {

std::mutex& sink_mutex()
{
    static std::mutex m;
    return m;
}

WarningSink& sink()
{
    static WarningSink s = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
    return s;
}

} // namespace

void warn(std::string_view message)
{
    std::lock_guard lock(sink_mutex());
    if (sink())
        sink()(message);
}

WarningSink set_warning_sink(WarningSink s)
{
    std::lock_guard lock(sink_mutex());
    return std::exchange(sink(), std::move(s));
}

} // namespace hsm
