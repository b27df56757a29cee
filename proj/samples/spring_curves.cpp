// Force-elongation table for the three training springs, plus the a/b
// interval where the Gaussian laws beat the linear one.
#include <cstdio>

#include <springcurl/springs.hpp>

using namespace springcurl;

int main() {
  const auto ls = main_spring(SpringKind::Linear);
  const auto gs = main_spring(SpringKind::Gaussian);
  const auto ags = main_spring(SpringKind::AntisymGaussian);

  std::printf("elong_mm,LS_N,GS_N,AGS_N\n");
  for (int x = 0; x <= 180; x += 5) {
    std::printf("%d,%.4f,%.4f,%.4f\n", x, spring_force(ls, x), spring_force(gs, x), spring_force(ags, x));
  }

  const auto [a, b] = linear_intersections(ags);
  std::printf("# nonlinear springs have the smaller force error on (%.3f, %.3f) mm\n", a, b);
  return 0;
}
