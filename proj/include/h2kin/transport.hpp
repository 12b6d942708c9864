#pragma once

#include <Eigen/Dense>

#include "h2kin/mechanism.hpp"
#include "h2kin/thermo.hpp"

namespace h2kin {

/// Reduced collision integrals (Neufeld fits) with the Brokaw polar
/// correction delta* = mu^2 / (2 eps sigma^3), reduced units.
double omega11(double T_star, double delta_star = 0.0);
double omega22(double T_star, double delta_star = 0.0);

/// Chapman-Enskog binary diffusion coefficient D_ij, m^2/s.
double binary_diffusion(const Mechanism& m, int i, int j, double T, double P);
/// Symmetric matrix of all D_ij at (T, P).
Eigen::MatrixXd binary_diffusion_matrix(const Mechanism& m, double T, double P);

/// Pure-species viscosity (Pa s) and conductivity (W/(m K), modified Eucken).
Eigen::VectorXd species_viscosities(const Mechanism& m, double T);
Eigen::VectorXd species_conductivities(const Mechanism& m, double T);

/// Mixture-averaged diffusion D_i = (1 - Y_i) / sum_{j != i} X_j / D_ij.
/// A species with no collision partner present (pure state) gets its
/// self-diffusion coefficient; `substituted`, when given, counts those.
Eigen::VectorXd mixture_diffusion(const Mechanism& m, double T, double P, const Eigen::VectorXd& Y,
                                  int* substituted = nullptr);
/// Same, from a precomputed binary_diffusion_matrix.
Eigen::VectorXd mixture_diffusion(const Mechanism& m, const Eigen::VectorXd& Y, const Eigen::MatrixXd& Dij,
                                  int* substituted = nullptr);

/// Wilke mixture viscosity, Pa s.
double mixture_viscosity(const Mechanism& m, double T, const Eigen::VectorXd& Y);
/// Wassiljewa mixture conductivity with Mason-Saxena weights, W/(m K).
double mixture_conductivity(const Mechanism& m, double T, const Eigen::VectorXd& Y);

struct TransportCoefficients {
  Eigen::VectorXd D;  // mixture-averaged diffusion, m^2/s
  double lambda = 0.0;
  double mu = 0.0;
  double alpha = 0.0;  // lambda / (rho cp)
};

TransportCoefficients transport_coefficients(const Mechanism& m, const ThermoState& s);

}  // namespace h2kin
