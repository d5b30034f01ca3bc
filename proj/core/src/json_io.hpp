#ifndef MLAB_SRC_JSON_IO_HPP
#define MLAB_SRC_JSON_IO_HPP

// Internal JSONL (de)serialization for store records. Kept out of the public
// headers so the installed interface does not depend on the vendored json.

#include <json.hpp>

#include "mlab/records.hpp"
#include "mlab/store.hpp"

namespace mlab::jsonio {

using nlohmann::json;

json thread_to_json(const ThreadRecord& t);
ThreadRecord thread_from_json(const json& j);

json commit_to_json(const CommitRecord& c);
CommitRecord commit_from_json(const json& j);

json developer_to_json(const DeveloperRecord& d);
DeveloperRecord developer_from_json(const json& j);

json manifest_to_json(const StoreManifest& m);
StoreManifest manifest_from_json(const json& j);

// One canonical line per record, '\n' terminated, keys sorted.
std::string to_jsonl_line(const json& j);

}  // namespace mlab::jsonio

#endif
