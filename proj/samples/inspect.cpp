// Loads a hexahedral mesh, prints its scaled-Jacobian statistics and writes a
// screenshot with the worst cells exposed.
//
//   inspect [mesh] [out.png]

#include <cstdio>
#include <iostream>

#include "hexinspect/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace hexinspect;
  const std::string in = argc > 1 ? argv[1] : HEXINSPECT_SAMPLE_DATA "/wavy.mesh";
  const std::string out = argc > 2 ? argv[2] : "inspect.png";
  try {
    const HexMesh mesh = load_mesh_file(in);
    const auto sj = evaluate_metric(mesh, Metric::SJ);
    const auto s = summary(sj);
    std::printf("%zu cells  SJ min %s  avg %s  max %s  outside acceptable %zu\n", s.count, format_double(s.min).c_str(),
                format_double(s.avg).c_str(), format_double(s.max).c_str(), s.below_acceptable);

    // Keep only cells below the 0.96 scaled Jacobian mark, colored by quality.
    Status status;
    status.width = 640;
    status.height = 480;
    status.quality.enabled = true;
    status.quality.threshold_raw = 0.96;
    status.colormap = Colormap::Parula;
    const Rendering r = render_mesh(mesh, status);
    write_file(out, r.png);
    std::printf("%zu cells shown, wrote %s\n", r.filter.visible_count(), out.c_str());
  } catch (const std::exception& e) {
    std::cerr << "inspect: " << e.what() << "\n";
    return 1;
  }
}
