// Generates the deterministic stand-in datasets (edge list + labels) used by
// the test and acceptance suites, so experiments run hermetically.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "specwalk/errors.hpp"
#include "specwalk/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"synthetic dataset generator"};
  std::string preset;
  std::string outdir = "data";
  std::uint64_t seed = 0;  // 0 = preset default
  app.add_option("--preset", preset,
                 "usair-like | celegans-like | infect-hyper-like | "
                 "power-like | cora-like | citeseer-like")
      ->required();
  app.add_option("--outdir", outdir, "output directory");
  app.add_option("--seed", seed, "override the preset seed");
  CLI11_PARSE(app, argc, argv);

  try {
    specwalk::SynthSpec spec = specwalk::preset_by_name(preset);
    if (seed != 0) spec.seed = seed;
    const specwalk::SynthDataset ds = specwalk::generate_synthetic(spec);
    std::filesystem::create_directories(outdir);
    const std::string edges =
        (std::filesystem::path(outdir) / (ds.name + ".edges")).string();
    specwalk::save_edge_list_file(ds.graph, edges);
    std::cout << ds.name << ": n=" << ds.graph.num_vertices()
              << " m=" << ds.graph.num_edges() << " -> " << edges << '\n';
    if (!ds.labels.empty()) {
      const std::string labels =
          (std::filesystem::path(outdir) / (ds.name + ".labels")).string();
      std::ofstream out(labels);
      for (std::size_t v = 0; v < ds.labels.size(); ++v)
        out << v << '\t' << ds.labels[v] << '\n';
      std::cout << "labels -> " << labels << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
