#pragma once

#include <string_view>

namespace evidex::resources {

std::string_view query_architect_prompt() noexcept;
std::string_view query_dsl_schema() noexcept;

} // namespace evidex::resources
