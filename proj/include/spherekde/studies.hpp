#pragma once

#include <string>
#include <vector>

#include "spherekde/evaluation.hpp"
#include "spherekde/sampling.hpp"

namespace spherekde {

/// The simulation designs used throughout the examples and tests.

/// Two components on S2: W = (1/2, 1/2), K = (12, 10), M = ((0,0,1), (0,-1,0)).
VmfMixtureSpec two_peak_mixture_s2();

/// Four components on S1: W = (1/5, 3/10, 1/10, 2/5), K = (4, 6, 10, 12),
/// mean angles 0, pi/3, pi/4, -pi/2.
VmfMixtureSpec four_peak_mixture_s1();

/// Halves and quarters of the sphere split at phi = 0 and theta = pi/2.
std::vector<NamedRectRegion> sphere_halves_quarters();
/// Halves and quarters of the circle split at 0 and +-pi/2.
std::vector<NamedArcRegion> circle_halves_quarters();
/// Polar caps theta <= pi/2, pi/3, pi/4, pi/5.
std::vector<NamedRectRegion> polar_caps();
/// Caps and boxes around the two peaks of two_peak_mixture_s2().
std::vector<NamedRectRegion> two_peak_regions();
/// Quarter-turn arcs around the peaks of four_peak_mixture_s1().
std::vector<NamedArcRegion> four_peak_arcs();

/// A named probability-table design.
struct StudyPreset {
  std::string name;
  int d = 2;
  LawS1 law_s1;  // d = 1
  LawS2 law_s2;  // d = 2
  std::vector<NamedArcRegion> arcs;
  std::vector<NamedRectRegion> rects;
};

/// uniform-s2, uniform-s1, vmf-s2, mixture-s2, mixture-s1.
std::vector<std::string> study_preset_names();
/// Throws std::invalid_argument for an unknown name.
StudyPreset study_preset(const std::string& name);

}  // namespace spherekde
