#include "spherekde/studies.hpp"

#include <cmath>
#include <stdexcept>

namespace spherekde {

VmfMixtureSpec two_peak_mixture_s2() {
  return {{0.5, 0.5}, {VmfSpec::sphere({0.0, 0.0, 1.0}, 12.0), VmfSpec::sphere({0.0, -1.0, 0.0}, 10.0)}};
}

VmfMixtureSpec four_peak_mixture_s1() {
  return {{0.2, 0.3, 0.1, 0.4},
          {VmfSpec::circle(0.0, 4.0), VmfSpec::circle(kPi / 3.0, 6.0), VmfSpec::circle(kPi / 4.0, 10.0),
           VmfSpec::circle(-kPi / 2.0, 12.0)}};
}

std::vector<NamedRectRegion> sphere_halves_quarters() {
  const double h = kPi / 2.0;
  return {{"half 1", RectRegion::box(0.0, kPi, -kPi, 0.0)},
          {"half 2", RectRegion::box(0.0, kPi, 0.0, kPi)},
          {"quarter 1", RectRegion::box(0.0, h, -kPi, 0.0)},
          {"quarter 2", RectRegion::box(0.0, h, 0.0, kPi)},
          {"quarter 3", RectRegion::box(h, kPi, -kPi, 0.0)},
          {"quarter 4", RectRegion::box(h, kPi, 0.0, kPi)}};
}

std::vector<NamedArcRegion> circle_halves_quarters() {
  const double h = kPi / 2.0;
  return {{"half 1", ArcRegion::span(-kPi, 0.0)},  {"half 2", ArcRegion::span(0.0, kPi)},
          {"quarter 1", ArcRegion::span(-kPi, -h)}, {"quarter 2", ArcRegion::span(-h, 0.0)},
          {"quarter 3", ArcRegion::span(0.0, h)},   {"quarter 4", ArcRegion::span(h, kPi)}};
}

std::vector<NamedRectRegion> polar_caps() {
  std::vector<NamedRectRegion> out;
  for (int k : {2, 3, 4, 5}) {
    out.push_back({"cap pi/" + std::to_string(k), RectRegion::box(0.0, kPi / k, -kPi, kPi)});
  }
  return out;
}

std::vector<NamedRectRegion> two_peak_regions() {
  return {{"cap pi/6", RectRegion::box(0.0, kPi / 6.0, -kPi, kPi)},
          {"cap pi/4", RectRegion::box(0.0, kPi / 4.0, -kPi, kPi)},
          {"box pi/3", RectRegion::box(kPi / 3.0, 2.0 * kPi / 3.0, -2.0 * kPi / 3.0, -kPi / 3.0)},
          {"box pi/4", RectRegion::box(kPi / 4.0, 3.0 * kPi / 4.0, -3.0 * kPi / 4.0, -kPi / 4.0)}};
}

std::vector<NamedArcRegion> four_peak_arcs() {
  return {{"[-pi/4, pi/4]", ArcRegion::span(-kPi / 4.0, kPi / 4.0)},
          {"[-3pi/4, -pi/4]", ArcRegion::span(-3.0 * kPi / 4.0, -kPi / 4.0)},
          {"[-pi/2, 0]", ArcRegion::span(-kPi / 2.0, 0.0)},
          {"[pi/12, 7pi/12]", ArcRegion::span(kPi / 12.0, 7.0 * kPi / 12.0)}};
}

std::vector<std::string> study_preset_names() {
  return {"uniform-s2", "uniform-s1", "vmf-s2", "mixture-s2", "mixture-s1"};
}

StudyPreset study_preset(const std::string& name) {
  StudyPreset p;
  p.name = name;
  if (name == "uniform-s2") {
    p.law_s2 = uniform_law_s2();
    p.rects = sphere_halves_quarters();
  } else if (name == "uniform-s1") {
    p.d = 1;
    p.law_s1 = uniform_law_s1();
    p.arcs = circle_halves_quarters();
  } else if (name == "vmf-s2") {
    p.law_s2 = vmf_law_s2(VmfSpec::sphere({0.0, 0.0, 1.0}, 1.0));
    p.rects = polar_caps();
  } else if (name == "mixture-s2") {
    p.law_s2 = mixture_law_s2(two_peak_mixture_s2());
    p.rects = two_peak_regions();
  } else if (name == "mixture-s1") {
    p.d = 1;
    p.law_s1 = mixture_law_s1(four_peak_mixture_s1());
    p.arcs = four_peak_arcs();
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return p;
}

}  // namespace spherekde
