#include <jointopt/mma.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jointopt {

namespace {

using Eigen::ArrayXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Convex separable subproblem data.
struct Subproblem {
  int n = 0, m = 0;
  ArrayXd low, upp, alfa, beta;
  ArrayXd p0, q0;
  MatrixXd p, q;  // m x n
  double a0 = 1.0;
  ArrayXd a, b, c, d;
};

struct Point {
  ArrayXd x, y;
  double z = 1.0;
  ArrayXd lam, xsi, eta, mu;
  double zet = 1.0;
  ArrayXd s;
};

// Stacked residual of the perturbed KKT system.
VectorXd residual(const Subproblem& sp, const Point& pt, double epsi) {
  const int n = sp.n, m = sp.m;
  const ArrayXd ux1 = sp.upp - pt.x;
  const ArrayXd xl1 = pt.x - sp.low;
  const ArrayXd plam = sp.p0 + (sp.p.transpose() * pt.lam.matrix()).array();
  const ArrayXd qlam = sp.q0 + (sp.q.transpose() * pt.lam.matrix()).array();
  const ArrayXd gvec = (sp.p * ux1.inverse().matrix() + sp.q * xl1.inverse().matrix()).array();
  const ArrayXd dpsidx = plam / ux1.square() - qlam / xl1.square();

  VectorXd r(3 * n + 4 * m + 2);
  int k = 0;
  r.segment(k, n) = (dpsidx - pt.xsi + pt.eta).matrix(); k += n;
  r.segment(k, m) = (sp.c + sp.d * pt.y - pt.mu - pt.lam).matrix(); k += m;
  r[k++] = sp.a0 - pt.zet - (sp.a * pt.lam).sum();
  r.segment(k, m) = (gvec - sp.a * pt.z - pt.y + pt.s - sp.b).matrix(); k += m;
  r.segment(k, n) = (pt.xsi * (pt.x - sp.alfa) - epsi).matrix(); k += n;
  r.segment(k, n) = (pt.eta * (sp.beta - pt.x) - epsi).matrix(); k += n;
  r.segment(k, m) = (pt.mu * pt.y - epsi).matrix(); k += m;
  r[k++] = pt.zet * pt.z - epsi;
  r.segment(k, m) = (pt.lam * pt.s - epsi).matrix();
  return r;
}

double max_ratio(const ArrayXd& num, const ArrayXd& den, double scale) {
  if (num.size() == 0) return 0.0;
  return (scale * num / den).maxCoeff();
}

Point solve_subproblem(const Subproblem& sp, double epsimin) {
  const int n = sp.n, m = sp.m;
  Point pt;
  pt.x = 0.5 * (sp.alfa + sp.beta);
  pt.y = ArrayXd::Ones(m);
  pt.z = 1.0;
  pt.zet = 1.0;
  pt.lam = ArrayXd::Ones(m);
  pt.s = ArrayXd::Ones(m);
  pt.xsi = (1.0 / (pt.x - sp.alfa)).max(1.0);
  pt.eta = (1.0 / (sp.beta - pt.x)).max(1.0);
  pt.mu = (0.5 * sp.c).max(1.0);

  double epsi = 1.0;
  while (epsi > epsimin) {
    VectorXd res = residual(sp, pt, epsi);
    double resnorm = res.norm();
    double resmax = res.cwiseAbs().maxCoeff();
    int inner = 0;
    while (resmax > 0.9 * epsi && inner < 200) {
      ++inner;
      const ArrayXd ux1 = sp.upp - pt.x;
      const ArrayXd xl1 = pt.x - sp.low;
      const ArrayXd ux2 = ux1.square(), xl2 = xl1.square();
      const ArrayXd ux3 = ux1 * ux2, xl3 = xl1 * xl2;
      const ArrayXd plam = sp.p0 + (sp.p.transpose() * pt.lam.matrix()).array();
      const ArrayXd qlam = sp.q0 + (sp.q.transpose() * pt.lam.matrix()).array();
      const ArrayXd gvec =
          (sp.p * ux1.inverse().matrix() + sp.q * xl1.inverse().matrix()).array();
      const MatrixXd gg = sp.p * ux2.inverse().matrix().asDiagonal() -
                          sp.q * xl2.inverse().matrix().asDiagonal();
      const ArrayXd dpsidx = plam / ux2 - qlam / xl2;
      const ArrayXd delx = dpsidx - epsi / (pt.x - sp.alfa) + epsi / (sp.beta - pt.x);
      const ArrayXd dely = sp.c + sp.d * pt.y - pt.lam - epsi / pt.y;
      const double delz = sp.a0 - (sp.a * pt.lam).sum() - epsi / pt.z;
      const ArrayXd dellam = gvec - sp.a * pt.z - pt.y - sp.b + epsi / pt.lam;
      const ArrayXd diagx = 2.0 * (plam / ux3 + qlam / xl3) + pt.xsi / (pt.x - sp.alfa) +
                            pt.eta / (sp.beta - pt.x);
      const ArrayXd diagy = sp.d + pt.mu / pt.y;
      const ArrayXd diaglam = pt.s / pt.lam;
      const ArrayXd diaglamyi = diaglam + diagy.inverse();

      ArrayXd dx, dlam;
      double dz = 0.0;
      if (m < n) {
        const VectorXd blam =
            (dellam + dely / diagy).matrix() - gg * (delx / diagx).matrix();
        MatrixXd aa(m + 1, m + 1);
        aa.topLeftCorner(m, m) = gg * diagx.inverse().matrix().asDiagonal() * gg.transpose();
        aa.topLeftCorner(m, m).diagonal() += diaglamyi.matrix();
        aa.topRightCorner(m, 1) = sp.a.matrix();
        aa.bottomLeftCorner(1, m) = sp.a.matrix().transpose();
        aa(m, m) = -pt.zet / pt.z;
        VectorXd bb(m + 1);
        bb << blam, delz;
        const VectorXd sol = aa.partialPivLu().solve(bb);
        dlam = sol.head(m).array();
        dz = sol[m];
        dx = -delx / diagx - (gg.transpose() * dlam.matrix()).array() / diagx;
      } else {
        const ArrayXd dellamyi = dellam + dely / diagy;
        const ArrayXd inv = diaglamyi.inverse();
        MatrixXd aa(n + 1, n + 1);
        aa.topLeftCorner(n, n) = gg.transpose() * inv.matrix().asDiagonal() * gg;
        aa.topLeftCorner(n, n).diagonal() += diagx.matrix();
        const VectorXd axz = -gg.transpose() * (sp.a * inv).matrix();
        aa.topRightCorner(n, 1) = axz;
        aa.bottomLeftCorner(1, n) = axz.transpose();
        aa(n, n) = pt.zet / pt.z + (sp.a * sp.a * inv).sum();
        const VectorXd bx = delx.matrix() + gg.transpose() * (dellamyi * inv).matrix();
        const double bz = delz - (sp.a * dellamyi * inv).sum();
        VectorXd bb(n + 1);
        bb << -bx, -bz;
        const VectorXd sol = aa.partialPivLu().solve(bb);
        dx = sol.head(n).array();
        dz = sol[n];
        dlam = (gg * dx.matrix()).array() * inv - dz * sp.a * inv + dellamyi * inv;
      }
      const ArrayXd dy = -dely / diagy + dlam / diagy;
      const ArrayXd dxsi = -pt.xsi + epsi / (pt.x - sp.alfa) - pt.xsi * dx / (pt.x - sp.alfa);
      const ArrayXd deta = -pt.eta + epsi / (sp.beta - pt.x) + pt.eta * dx / (sp.beta - pt.x);
      const ArrayXd dmu = -pt.mu + epsi / pt.y - pt.mu * dy / pt.y;
      const double dzet = -pt.zet + epsi / pt.z - pt.zet * dz / pt.z;
      const ArrayXd ds = -pt.s + epsi / pt.lam - pt.s * dlam / pt.lam;

      double stm = std::max({max_ratio(dy, pt.y, -1.01), -1.01 * dz / pt.z,
                             max_ratio(dlam, pt.lam, -1.01), max_ratio(dxsi, pt.xsi, -1.01),
                             max_ratio(deta, pt.eta, -1.01), max_ratio(dmu, pt.mu, -1.01),
                             -1.01 * dzet / pt.zet, max_ratio(ds, pt.s, -1.01),
                             max_ratio(dx, pt.x - sp.alfa, -1.01),
                             max_ratio(dx, sp.beta - pt.x, 1.01), 1.0});
      double step = 1.0 / stm;

      const Point old = pt;
      double newnorm = 2.0 * resnorm;
      int halvings = 0;
      while (newnorm > resnorm && halvings < 50) {
        ++halvings;
        pt.x = old.x + step * dx;
        pt.y = old.y + step * dy;
        pt.z = old.z + step * dz;
        pt.lam = old.lam + step * dlam;
        pt.xsi = old.xsi + step * dxsi;
        pt.eta = old.eta + step * deta;
        pt.mu = old.mu + step * dmu;
        pt.zet = old.zet + step * dzet;
        pt.s = old.s + step * ds;
        res = residual(sp, pt, epsi);
        newnorm = res.norm();
        step *= 0.5;
      }
      resnorm = newnorm;
      resmax = res.cwiseAbs().maxCoeff();
    }
    epsi *= 0.1;
  }
  return pt;
}

}  // namespace

MmaStepResult mma_step(const VectorXd& xval, double f0, const VectorXd& df0dx,
                       const VectorXd& fval, const MatrixXd& dfdx, const VectorXd& xmin,
                       const VectorXd& xmax, MmaState& state, const MmaSettings& s) {
  (void)f0;
  const int n = static_cast<int>(xval.size());
  const int m = static_cast<int>(fval.size());
  if (df0dx.size() != n || dfdx.rows() != m || (m > 0 && dfdx.cols() != n) ||
      xmin.size() != n || xmax.size() != n)
    throw InputError("MMA input dimensions are inconsistent");
  if (!((xmax - xmin).array() > 0.0).all()) throw InputError("MMA bounds must satisfy xmin < xmax");
  if (!df0dx.allFinite() || !fval.allFinite() || !dfdx.allFinite())
    throw NumericalError("non-finite objective or constraint data passed to MMA");
  for (int i = 0; i < m; ++i) {
    if (fval[i] > 0.0 && dfdx.row(i).cwiseAbs().maxCoeff() == 0.0) {
      std::ostringstream os;
      os << "MMA subproblem infeasible: constraint " << i
         << " is violated and has a zero gradient";
      throw NumericalError(os.str());
    }
  }

  const ArrayXd x = xval.array();
  const ArrayXd range = (xmax - xmin).array();
  ++state.iteration;
  if (state.iteration <= 2 || state.low.size() != n) {
    state.low = (x - s.asymptote_init * range).matrix();
    state.upp = (x + s.asymptote_init * range).matrix();
    if (state.xold1.size() != n) state.xold1 = xval;
    if (state.xold2.size() != n) state.xold2 = xval;
  } else {
    const ArrayXd zzz = (x - state.xold1.array()) * (state.xold1.array() - state.xold2.array());
    ArrayXd factor = ArrayXd::Ones(n);
    factor = (zzz > 0.0).select(s.asymptote_increase, factor);
    factor = (zzz < 0.0).select(s.asymptote_decrease, factor);
    ArrayXd low = x - factor * (state.xold1.array() - state.low.array());
    ArrayXd upp = x + factor * (state.upp.array() - state.xold1.array());
    low = low.max(x - s.asymptote_max * range).min(x - s.asymptote_min * range);
    upp = upp.min(x + s.asymptote_max * range).max(x + s.asymptote_min * range);
    state.low = low.matrix();
    state.upp = upp.matrix();
  }

  Subproblem sp;
  sp.n = n;
  sp.m = m;
  sp.low = state.low.array();
  sp.upp = state.upp.array();
  sp.alfa = (sp.low + s.albefa * (x - sp.low)).max(x - s.move * range).max(xmin.array());
  sp.beta = (sp.upp - s.albefa * (sp.upp - x)).min(x + s.move * range).min(xmax.array());

  const ArrayXd xmami = range.max(1e-5);
  const ArrayXd ux1 = sp.upp - x, xl1 = x - sp.low;
  const ArrayXd ux2 = ux1.square(), xl2 = xl1.square();
  {
    const ArrayXd pos = df0dx.array().max(0.0);
    const ArrayXd neg = (-df0dx.array()).max(0.0);
    const ArrayXd pq = 0.001 * (pos + neg) + s.raa0 / xmami;
    sp.p0 = (pos + pq) * ux2;
    sp.q0 = (neg + pq) * xl2;
  }
  sp.p.resize(m, n);
  sp.q.resize(m, n);
  for (int i = 0; i < m; ++i) {
    const ArrayXd row = dfdx.row(i).transpose().array();
    const ArrayXd pos = row.max(0.0), neg = (-row).max(0.0);
    const ArrayXd pq = 0.001 * (pos + neg) + s.raa0 / xmami;
    sp.p.row(i) = ((pos + pq) * ux2).matrix().transpose();
    sp.q.row(i) = ((neg + pq) * xl2).matrix().transpose();
  }
  sp.b = (sp.p * ux1.inverse().matrix() + sp.q * xl1.inverse().matrix()).array() -
         fval.array();
  sp.a0 = 1.0;
  sp.a = ArrayXd::Zero(m);
  sp.c = ArrayXd::Constant(m, s.c_penalty);
  sp.d = ArrayXd::Constant(m, s.d_penalty);

  const Point pt = solve_subproblem(sp, s.subproblem_tolerance);

  MmaStepResult out;
  out.x = pt.x.max(xmin.array()).min(xmax.array()).matrix();
  out.y = pt.y.matrix();
  out.z = pt.z;
  out.lambda = pt.lam.matrix();
  out.kkt_residual = residual(sp, pt, 0.0).cwiseAbs().maxCoeff();
  state.xold2 = state.xold1;
  state.xold1 = xval;
  return out;
}

}  // namespace jointopt
