#include "contacton/triad.hpp"

#include <cmath>
#include <sstream>

namespace contacton {

PreconditionError::PreconditionError(std::string residual, double value, double threshold)
    : Error([&] {
          std::ostringstream os;
          os << "precondition failed: " << residual << " = " << value << " exceeds " << threshold;
          return os.str();
      }()),
      residual_(std::move(residual)),
      value_(value) {}

TriadPoint::TriadPoint(Vec c, int n_) : coords(std::move(c)), n(n_) {
    if (n < 1 || n > kMaxN) throw DimensionError("triad dimension n out of range");
    if (coords.size() != 2 * n + 1) throw DimensionError("point has wrong number of coordinates");
    if (!coords.allFinite()) throw Error("point has non-finite coordinates");
}

TangentVec::TangentVec(TriadPoint b, Vec c) : base(std::move(b)), components(std::move(c)) {
    if (components.size() != base.coords.size())
        throw DimensionError("tangent vector and base point differ in dimension");
}

TriadChart::TriadChart(int n, double fd_step) : n_(n), h_(fd_step) {
    if (n < 1 || n > kMaxN) throw DimensionError("triad dimension n out of range");
    if (!(fd_step > 0)) throw Error("finite-difference step must be positive");
}

void TriadChart::check(const Vec& v) const {
    if (v.size() != dim()) throw DimensionError("vector dimension does not match chart");
}

double TriadChart::lambda(const Vec& p, const Vec& v) const {
    double s = v(iz());
    for (int i = 0; i < n_; ++i) s -= p(iy(i)) * v(ix(i));
    return s;
}

Vec TriadChart::lambda_row(const Vec& p) const {
    Vec r = Vec::Zero(dim());
    for (int i = 0; i < n_; ++i) r(ix(i)) = -p(iy(i));
    r(iz()) = 1.0;
    return r;
}

Vec TriadChart::reeb(const Vec&) const {
    Vec r = Vec::Zero(dim());
    r(iz()) = 1.0;
    return r;
}

Vec TriadChart::project(const Vec& p, const Vec& v) const {
    Vec w = v;
    w(iz()) -= lambda(p, v);
    return w;
}

Vec TriadChart::J(const Vec& p, const Vec& v) const {
    // Pi v = sum a_i e_i + b_i f_i with a_i = v_{x_i}, b_i = v_{y_i}.
    Vec w = Vec::Zero(dim());
    for (int i = 0; i < n_; ++i) {
        const double a = v(ix(i)), b = v(iy(i));
        w(ix(i)) = -b;
        w(iy(i)) = a;
        w(iz()) += -b * p(iy(i));
    }
    return w;
}

Mat TriadChart::J_matrix(const Vec& p) const {
    Mat m = Mat::Zero(dim(), dim());
    for (int k = 0; k < dim(); ++k) {
        Vec e = Vec::Zero(dim());
        e(k) = 1.0;
        m.col(k) = J(p, e);
    }
    return m;
}

double TriadChart::dlambda(const Vec& v, const Vec& w) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += v(ix(i)) * w(iy(i)) - v(iy(i)) * w(ix(i));
    return s;
}

double TriadChart::metric(const Vec& p, const Vec& v, const Vec& w) const {
    return dlambda(project(p, v), J(p, w)) + lambda(p, v) * lambda(p, w);
}

Mat TriadChart::metric_matrix(const Vec& p) const {
    Mat g(dim(), dim());
    for (int a = 0; a < dim(); ++a)
        for (int b = 0; b < dim(); ++b) {
            Vec ea = Vec::Zero(dim()), eb = Vec::Zero(dim());
            ea(a) = 1.0;
            eb(b) = 1.0;
            g(a, b) = metric(p, ea, eb);
        }
    return g;
}

Mat TriadChart::frame(const Vec& p) const {
    Mat F = Mat::Zero(dim(), dim());
    for (int i = 0; i < n_; ++i) {
        F(ix(i), i) = 1.0;
        F(iz(), i) = p(iy(i));
        F(iy(i), n_ + i) = 1.0;
    }
    F(iz(), 2 * n_) = 1.0;
    return F;
}

Vec TriadChart::xi_coords(const Vec&, const Vec& v) const {
    Vec c(2 * n_);
    for (int i = 0; i < n_; ++i) {
        c(i) = v(ix(i));
        c(n_ + i) = v(iy(i));
    }
    return c;
}

Vec TriadChart::from_xi_coords(const Vec& p, const Vec& c) const {
    Vec v = Vec::Zero(dim());
    for (int i = 0; i < n_; ++i) {
        v(ix(i)) = c(i);
        v(iy(i)) = c(n_ + i);
        v(iz()) += c(i) * p(iy(i));
    }
    return v;
}

Vec TriadChart::J_xi(const Vec& c) const {
    Vec w(2 * n_);
    for (int i = 0; i < n_; ++i) {
        w(i) = -c(n_ + i);
        w(n_ + i) = c(i);
    }
    return w;
}

Vec TriadChart::reeb_flow(const Vec& p, double s) const {
    Vec q = p;
    q(iz()) += s;
    return q;
}

Mat lie_derivative_along_flow(const TensorField& A, const FlowMap& phi,
                              const FlowDifferential& dphi, const Vec& p, double h) {
    auto pulled = [&](double s) -> Mat {
        const Mat D = dphi(p, s);
        return D.partialPivLu().solve(A(phi(p, s)) * D);
    };
    return (pulled(h) - pulled(-h)) / (2.0 * h);
}

Mat TriadChart::lie_derivative_RJ(const Vec& p, double h) const {
    auto A = [this](const Vec& q) { return J_matrix(q); };
    auto phi = [this](const Vec& q, double s) { return reeb_flow(q, s); };
    const int d = dim();
    auto dphi = [d](const Vec&, double) -> Mat { return Mat::Identity(d, d); };
    return lie_derivative_along_flow(A, phi, dphi, p, h);
}

double lambda_at(const TriadChart& chart, const TangentVec& v) {
    chart.check(v.components);
    chart.check(v.base.coords);
    return chart.lambda(v.base.coords, v.components);
}

TangentVec xi_project(const TriadChart& chart, const TangentVec& v) {
    chart.check(v.components);
    return TangentVec(v.base, chart.project(v.base.coords, v.components));
}

TangentVec J_apply(const TriadChart& chart, const TangentVec& v) {
    chart.check(v.components);
    return TangentVec(v.base, chart.J(v.base.coords, v.components));
}

Mat lie_derivative_RJ(const TriadChart& chart, const TriadPoint& p) {
    chart.check(p.coords);
    return chart.lie_derivative_RJ(p.coords);
}

LegendrianSpec LegendrianSpec::affine(const TriadChart& chart, const Vec& point, const Mat& tangents,
                                      double tol) {
    chart.check(point);
    if (tangents.rows() != chart.dim() || tangents.cols() != chart.n())
        throw DimensionError("Legendrian needs n tangent vectors in R^{2n+1}");
    LegendrianSpec L;
    L.p0_ = point;
    L.V_ = tangents;
    Eigen::HouseholderQR<Mat> qr(tangents);
    L.Q_ = qr.householderQ() * Mat::Identity(chart.dim(), chart.n());
    Eigen::FullPivLU<Mat> lu(tangents);
    if (lu.rank() != chart.n()) throw Error("Legendrian tangents are linearly dependent");
    L.B_ = Eigen::MatrixXd::Zero(chart.n() * chart.n(), chart.dim());
    const double defect = L.legendrian_defect(chart);
    if (defect > tol * (1.0 + point.norm()))
        throw Error("affine submanifold is not Legendrian (lambda defect " + std::to_string(defect) + ")");
    return L;
}

Vec LegendrianSpec::project(const Vec& p) const {
    return p0_ + Q_ * (Q_.transpose() * (p - p0_));
}

double LegendrianSpec::distance(const Vec& p) const { return (p - project(p)).norm(); }

Vec LegendrianSpec::project_tangent(const Vec& v) const { return Q_ * (Q_.transpose() * v); }

Vec LegendrianSpec::parameter(const Vec& p) const {
    return V_.colPivHouseholderQr().solve(p - p0_);
}

double LegendrianSpec::legendrian_defect(const TriadChart& chart) const {
    double worst = 0.0;
    for (int j = -1; j < V_.cols(); ++j) {
        const Vec q = j < 0 ? p0_ : Vec(p0_ + V_.col(j));
        for (int k = 0; k < V_.cols(); ++k)
            worst = std::max(worst, std::abs(chart.lambda(q, V_.col(k))));
    }
    return worst;
}

}  // namespace contacton
