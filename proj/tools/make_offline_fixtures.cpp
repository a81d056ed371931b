// Synthesizes the scripted forge responses for a seed corpus so the whole
// generate -> augment -> evaluate -> score pipeline runs offline. Candidate
// and judge sides use the bench-backed oracle providers instead (their
// content depends on the RNG-derived instances).

#include <CLI11.hpp>

#include <iostream>

#include "smart/dataset.hpp"
#include "smart/offline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"emit scripted forge responses for offline runs"};
  std::string seeds_path, out_path;
  app.add_option("--seeds", seeds_path, "seed corpus JSONL")->required();
  app.add_option("--out", out_path, "output stub script JSONL")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    auto loaded = smart::load_seeds(seeds_path);
    if (!loaded.rejects.empty()) {
      for (const auto& r : loaded.rejects) {
        std::cerr << "reject line " << r.line << ": " << r.reason << "\n";
      }
      return 1;
    }
    smart::offline::write_forge_stub(out_path, loaded.seeds);
    std::cout << out_path << " (" << loaded.seeds.size() << " seeds)\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
