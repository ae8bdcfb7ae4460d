#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// Command-line front end: census, immersion and pipeline subcommands.
// Results go to stdout (or files), progress to stderr.
namespace torsion8::cli {

enum ExitCode : int {
  kOk = 0,
  kInvariantFailure = 1,
  kBadFlags = 2,
  kOpenPrimes = 3,
  kContradiction = 4,
};

/// Entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

/// Round-robin shard of an ascending list: element i goes to shard i % count.
template <class T>
std::vector<T> shard(const std::vector<T>& items, int index, int count) {
  std::vector<T> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (static_cast<int>(i % static_cast<std::size_t>(count)) == index) out.push_back(items[i]);
  }
  return out;
}

}  // namespace torsion8::cli
