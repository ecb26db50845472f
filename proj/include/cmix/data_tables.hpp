#pragma once

#include <string_view>

namespace cmix::data {

/// Contents of data/devanagari.tsv, embedded at build time.
std::string_view devanagari_table();
/// Contents of data/qwerty_adjacency.tsv, embedded at build time.
std::string_view qwerty_adjacency_table();
/// Version tag of the embedded tables, printed by --version.
std::string_view tables_version();

}  // namespace cmix::data
