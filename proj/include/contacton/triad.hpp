#pragma once

#include "contacton/common.hpp"

#include <functional>
#include <vector>

namespace contacton {

struct TriadPoint {
    Vec coords;
    int n = 1;

    TriadPoint() = default;
    TriadPoint(Vec c, int n_);
};

struct TangentVec {
    TriadPoint base;
    Vec components;

    TangentVec() = default;
    TangentVec(TriadPoint b, Vec c);
};

// Standard contact triad on R^{2n+1}: coordinates (x_1..x_n, y_1..y_n, z),
// lambda = dz - sum y_i dx_i, R = d/dz, xi spanned by e_i = d/dx_i + y_i d/dz
// and f_i = d/dy_i, J e_i = f_i, J f_i = -e_i, J R = 0.
class TriadChart {
public:
    explicit TriadChart(int n = 1, double fd_step = 1e-4);

    int n() const { return n_; }
    int dim() const { return 2 * n_ + 1; }
    double fd_step() const { return h_; }

    int ix(int i) const { return i; }
    int iy(int i) const { return n_ + i; }
    int iz() const { return 2 * n_; }

    void check(const Vec& v) const;

    double lambda(const Vec& p, const Vec& v) const;
    Vec lambda_row(const Vec& p) const;
    Vec reeb(const Vec& p) const;
    Vec project(const Vec& p, const Vec& v) const;
    Vec J(const Vec& p, const Vec& v) const;
    Mat J_matrix(const Vec& p) const;
    double dlambda(const Vec& v, const Vec& w) const;
    double metric(const Vec& p, const Vec& v, const Vec& w) const;
    Mat metric_matrix(const Vec& p) const;
    double norm(const Vec& p, const Vec& v) const { return std::sqrt(metric(p, v, v)); }

    // Columns e_1..e_n, f_1..f_n, R at p.
    Mat frame(const Vec& p) const;
    // Components of Pi v in the unitary frame (e_i, f_i); length 2n.
    Vec xi_coords(const Vec& p, const Vec& v) const;
    Vec from_xi_coords(const Vec& p, const Vec& c) const;
    // J acting on frame components: (a, b) -> (-b, a).
    Vec J_xi(const Vec& c) const;

    Vec reeb_flow(const Vec& p, double s) const;

    // Matrix of (L_R J)_p from central differences of the Reeb-flow pushforward.
    Mat lie_derivative_RJ(const Vec& p, double h) const;
    Mat lie_derivative_RJ(const Vec& p) const { return lie_derivative_RJ(p, h_); }

private:
    int n_;
    double h_;
};

// (L_X A)_p = d/ds|0 (dphi_s)^{-1} A(phi_s p) dphi_s by central differences.
using TensorField = std::function<Mat(const Vec&)>;
using FlowMap = std::function<Vec(const Vec&, double)>;
using FlowDifferential = std::function<Mat(const Vec&, double)>;
Mat lie_derivative_along_flow(const TensorField& A, const FlowMap& phi,
                              const FlowDifferential& dphi, const Vec& p, double h);

double lambda_at(const TriadChart& chart, const TangentVec& v);
TangentVec xi_project(const TriadChart& chart, const TangentVec& v);
TangentVec J_apply(const TriadChart& chart, const TangentVec& v);
Mat lie_derivative_RJ(const TriadChart& chart, const TriadPoint& p);

// Affine Legendrian p0 + span(tangents).
class LegendrianSpec {
public:
    LegendrianSpec() = default;
    static LegendrianSpec affine(const TriadChart& chart, const Vec& point, const Mat& tangents,
                                 double tol = 1e-10);

    const Vec& point() const { return p0_; }
    const Mat& tangents() const { return V_; }
    const Mat& orthonormal_basis() const { return Q_; }
    int n() const { return static_cast<int>(V_.cols()); }

    Vec project(const Vec& p) const;
    double distance(const Vec& p) const;
    bool contains(const Vec& p, double tol) const { return distance(p) <= tol; }
    // Projects a displacement onto the tangent space.
    Vec project_tangent(const Vec& v) const;
    Vec at(const Vec& s) const { return p0_ + V_ * s; }
    // Least-squares parameter s with at(s) closest to p.
    Vec parameter(const Vec& p) const;
    // B(e_a, e_b) stacked row-wise; zero for affine submanifolds.
    const Eigen::MatrixXd& second_fundamental_form() const { return B_; }

    // Largest |lambda(v)| over tangents v at p0 and at p0 + tangents.
    double legendrian_defect(const TriadChart& chart) const;

private:
    Vec p0_;
    Mat V_;
    Mat Q_;
    Eigen::MatrixXd B_;
};

}  // namespace contacton
