// Runs every acceptance criterion and prints one verdict line per criterion.
// Exit status is nonzero iff any criterion fails.

#include <cstdio>
#include <string>

#include "gpscatter/acceptance.hpp"

int main(int argc, char** argv) {
  namespace acc = gpscatter::acceptance;
  const bool verbose = argc > 1 && std::string(argv[1]) == "-v";
  int failed = 0;
  for (const auto& c : acc::criteria()) {
    const auto r = acc::run(c);
    std::printf("criterion %2d  %s  %s (%.1f s)%s%s\n", r.id, r.pass ? "PASS" : "FAIL", r.title.c_str(), r.seconds,
                r.note.empty() ? "" : "  -- ", r.note.c_str());
    if (verbose || !r.pass)
      for (const auto& m : r.values)
        std::printf("      %-44s %.6e%s\n", m.name.c_str(), m.value, m.pass ? "" : "   <-- outside limit");
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(acc::criteria().size()) - failed, acc::criteria().size());
  return failed == 0 ? 0 : 1;
}
