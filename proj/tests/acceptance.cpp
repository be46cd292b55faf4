// Acceptance runner: one PASS/FAIL line per criterion. Arguments select criteria by id;
// no arguments runs all of them.

#include <cstdlib>
#include <iostream>
#include <set>
#include <string>

#include <sphereldp/checks.hpp>

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (*end != '\0') {
      std::cerr << "usage: acceptance [criterion id ...]\n";
      return 1;
    }
    wanted.insert(static_cast<int>(id));
  }
  bool all = true;
  std::size_t ran = 0;
  for (const auto& c : sphereldp::checks::acceptance_criteria()) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    ++ran;
    const auto r = sphereldp::checks::run_criterion(c);
    all = all && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << r.detail << '\n';
    for (const auto& p : r.parts)
      std::cout << "    " << (p.pass ? "pass" : "FAIL") << "  " << p.name << ": " << p.detail << '\n';
  }
  if (ran == 0) {
    std::cerr << "no such criterion\n";
    return 1;
  }
  return all ? 0 : 1;
}
