#pragma once

#include <vector>

#include "stieltjes/core.hpp"

namespace stieltjes {

// The Pick matrix of the data is too close to singular (or indefinite) for
// the admissible disk to be computed in double precision.
class ConditioningError : public Error {
public:
    using Error::Error;
};

struct Disk {
    cplx center;
    double radius = 0.0;
    // Set when the squared radius came out slightly negative and was clamped.
    bool pinned = false;

    bool contains(cplx w, double slack = 0.0) const { return std::abs(w - center) <= radius + slack; }
};

// Quantities behind one admissible disk, all divided by a common positive
// normalisation so that they stay finite when det N (or det P) underflows.
struct DiskDetail {
    Disk disk;
    double alpha = 0.0;  // (cof M xi, xi) / c
    cplx a;              // (cof M xi, eta) / c
    double beta = 0.0;   // (cof M eta, eta) / c
    double det = 0.0;    // det M / c
    // Right-hand side of the radius estimate: Im(w_c)/Im z * det/alpha for N,
    // Im(z w_c)/Im z * det/alpha for P.
    double radius_sq_bound = 0.0;
};

DiskDetail disk_N_detail(const SampleSet& s, cplx z);
DiskDetail disk_P_detail(const SampleSet& s, cplx z);

// Disk of admissible values of f(z) cut out by the N matrix of the extended data.
Disk disk_N(const SampleSet& s, cplx z);
// Same for the P matrix.
Disk disk_P(const SampleSet& s, cplx z);

struct AdmissibleLens {
    Disk diskN;
    Disk diskP;
    // Closed polyline tracing the boundary of the intersection of both disks.
    std::vector<cplx> boundary;
    bool empty = false;
};

// Boundary of the intersection of two disks, sampled with npoints vertices
// spread uniformly in angle over the bounding arcs.
AdmissibleLens intersect_disks(const Disk& a, const Disk& b, int npoints);

AdmissibleLens admissible_lens(const SampleSet& s, cplx z, int npoints = 256);

}  // namespace stieltjes
