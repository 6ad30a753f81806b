#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace kgp {

/// Lowercased alphanumeric tokens in input order.
using TokenStream = std::vector<std::string>;

/// Lowercases and splits on every non-alphanumeric character; empty fragments
/// are dropped. Input is decoded as UTF-8: non-ASCII code points count as
/// letters except those in punctuation/symbol blocks (so "Arthur\u2019s" splits
/// like "Arthur's"). Malformed bytes act as separators.
TokenStream tokenize(std::string_view text);

std::string_view trim(std::string_view s);

/// Longest prefix of at most `max_bytes` bytes that ends on a UTF-8
/// code point boundary.
std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Replaces every `{key}` occurrence with its value. Unknown placeholders are
/// left untouched so literal braces in templates survive.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

}  // namespace kgp
