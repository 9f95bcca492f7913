#pragma once

namespace thetaconf {

// Milnor's Lobachevsky function, -int_0^x log|2 sin t| dt. Odd and pi-periodic.
double lobachevsky(double x);

// Clausen function Cl2(t) = -int_0^t log|2 sin(s/2)| ds, so lobachevsky(x) = Cl2(2x)/2.
double clausen2(double t);

} // namespace thetaconf
