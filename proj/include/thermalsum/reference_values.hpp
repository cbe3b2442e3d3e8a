#pragma once

// Reference summary values that the reproduction pipelines are checked
// against.

#include <array>

#include "thermalsum/fitting.hpp"

namespace thermalsum::reference {

// Piecewise-seasonal simulation, sigma = 20, R = 10000.
// Index [tau][alpha][beta] with tau in {1000, 2000}, alpha in {4, 8, 10},
// beta in {0.2, 0.4, 0.8}.
inline constexpr std::array<double, 2> kSim2Taus{1000.0, 2000.0};
inline constexpr std::array<double, 3> kSim2Alphas{4.0, 8.0, 10.0};
inline constexpr std::array<double, 3> kSim2Betas{0.2, 0.4, 0.8};

inline constexpr double kSim2Mean[2][3][3] = {
    {{151.66, 136.83, 124.86}, {114.87, 111.27, 106.85}, {98.45, 97.20, 95.72}},
    {{199.54, 171.15, 149.16}, {169.81, 152.43, 137.37}, {156.22, 143.40, 131.34}},
};

inline constexpr double kSim2Sd[2][3][3] = {
    {{15.48, 10.42, 7.21}, {16.53, 13.27, 10.50}, {15.94, 14.45, 12.71}},
    {{10.96, 7.22, 4.84}, {10.93, 7.50, 5.11}, {10.69, 7.66, 5.36}},
};

// Walnut constant-forcing experiment: alpha, n, mean, sd.
inline const std::array<ForcingObservation, 5> kWalnutForcing{{
    {5.0, 30, 178.0, 27.28},
    {10.0, 30, 88.0, 12.44},
    {15.0, 30, 39.0, 11.33},
    {20.0, 30, 26.0, 7.67},
    {25.0, 30, 20.0, 4.45},
}};

// Lilac full-bloom grid by quartile of alpha (rows) and beta (columns).
inline constexpr std::array<double, 5> kLilacAlphaEdges{0.0, 0.7, 1.9, 4.7, 16.4};
inline constexpr std::array<double, 5> kLilacBetaEdges{-0.28, 0.07, 0.11, 0.15, 0.68};

inline constexpr double kLilacMean[4][4] = {
    {157.70, 152.07, 147.60, 142.20},
    {151.12, 146.88, 141.64, 136.15},
    {136.30, 131.92, 127.58, 124.94},
    {109.56, 109.77, 107.36, 105.71},
};

inline constexpr double kLilacSd[4][4] = {
    {12.80, 11.94, 10.90, 10.95},
    {12.76, 11.91, 12.67, 12.99},
    {16.68, 14.97, 14.45, 12.55},
    {19.39, 17.06, 15.31, 12.35},
};

} // namespace thermalsum::reference
