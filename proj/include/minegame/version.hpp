#ifndef MINEGAME_VERSION_HPP
#define MINEGAME_VERSION_HPP

namespace minegame {

inline constexpr const char* tool_version = "1.0.0";
inline constexpr int report_schema_version = 1;

}  // namespace minegame

#endif  // MINEGAME_VERSION_HPP
