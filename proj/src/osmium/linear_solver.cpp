#include "osmium/linear_solver.hpp"

#include <cstring>

#include "osmium/errors.hpp"

#ifdef OSMIUM_HAVE_UMFPACK
#include <cholmod.h>
#include <umfpack.h>
#else
#include <Eigen/SparseLU>
#endif

namespace osmium {

#ifdef OSMIUM_HAVE_UMFPACK

struct LinearSolver::Impl {
  int n = 0;
  std::vector<int> pattern_sig;  // outer ptr + checksum of inner indices
  std::vector<int> q;
  void* symbolic = nullptr;
  void* numeric = nullptr;
  double control[UMFPACK_CONTROL];
  Eigen::SparseMatrix<double> A;  // kept for solves

  Impl() { umfpack_di_defaults(control); }
  ~Impl() {
    if (symbolic) umfpack_di_free_symbolic(&symbolic);
    if (numeric) umfpack_di_free_numeric(&numeric);
  }

  bool same_pattern(const Eigen::SparseMatrix<double>& K) const {
    if (n != K.rows() || pattern_sig.empty()) return false;
    if (pattern_sig[0] != static_cast<int>(K.nonZeros())) return false;
    int checksum = 0;
    const int* inner = K.innerIndexPtr();
    for (int i = 0; i < K.nonZeros(); i += 97) checksum ^= inner[i] * (i + 1);
    return pattern_sig[1] == checksum;
  }

  void store_pattern(const Eigen::SparseMatrix<double>& K) {
    pattern_sig.assign(2, 0);
    pattern_sig[0] = static_cast<int>(K.nonZeros());
    int checksum = 0;
    const int* inner = K.innerIndexPtr();
    for (int i = 0; i < K.nonZeros(); i += 97) checksum ^= inner[i] * (i + 1);
    pattern_sig[1] = checksum;
  }

  void build_ordering(const Eigen::SparseMatrix<double>& K) {
    const int N = static_cast<int>(K.rows());
    // columns of unusual degree go last (constraint multipliers, leak column)
    std::vector<int> degree(N, 0);
    for (int k = 0; k < K.outerSize(); ++k)
      degree[k] = K.outerIndexPtr()[k + 1] - K.outerIndexPtr()[k];
    std::vector<int> rowdeg(N, 0);
    for (int k = 0; k < K.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it) rowdeg[it.row()]++;
    long long total = 0;
    for (int d : degree) total += d;
    const int mean = static_cast<int>(total / std::max(1, N));
    const int cutoff = std::max(8 * mean, 64);
    std::vector<char> dense(N, 0);
    for (int i = 0; i < N; ++i)
      if (degree[i] > cutoff || rowdeg[i] > cutoff) dense[i] = 1;

    // symmetrized pattern without the dense dofs
    Eigen::SparseMatrix<double> S(N, N);
    {
      std::vector<Eigen::Triplet<double>> T;
      T.reserve(2 * K.nonZeros());
      for (int k = 0; k < K.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it) {
          if (dense[it.row()] || dense[it.col()] || it.row() == it.col()) continue;
          T.emplace_back(it.row(), it.col(), 1.0);
          T.emplace_back(it.col(), it.row(), 1.0);
        }
      S.setFromTriplets(T.begin(), T.end());
      S.makeCompressed();
    }
    cholmod_common c;
    cholmod_start(&c);
    cholmod_sparse Achol;
    std::memset(&Achol, 0, sizeof(Achol));
    Achol.nrow = N;
    Achol.ncol = N;
    Achol.nzmax = S.nonZeros();
    Achol.p = const_cast<int*>(S.outerIndexPtr());
    Achol.i = const_cast<int*>(S.innerIndexPtr());
    Achol.stype = -1;
    Achol.itype = CHOLMOD_INT;
    Achol.xtype = CHOLMOD_PATTERN;
    Achol.dtype = CHOLMOD_DOUBLE;
    Achol.sorted = 1;
    Achol.packed = 1;
    std::vector<int> perm(N), cparent(N), cmember(N);
    cholmod_nested_dissection(&Achol, nullptr, 0, perm.data(), cparent.data(), cmember.data(),
                              &c);
    cholmod_finish(&c);
    q.clear();
    q.reserve(N);
    for (int i = 0; i < N; ++i)
      if (!dense[perm[i]]) q.push_back(perm[i]);
    for (int i = 0; i < N; ++i)
      if (dense[i]) q.push_back(i);
  }
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;

bool LinearSolver::factor(const Eigen::SparseMatrix<double>& K) {
  auto& im = *impl_;
  im.A = K;
  im.A.makeCompressed();
  if (!im.same_pattern(im.A)) {
    if (im.symbolic) umfpack_di_free_symbolic(&im.symbolic);
    im.symbolic = nullptr;
    im.n = static_cast<int>(im.A.rows());
    im.build_ordering(im.A);
    im.control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_UNSYMMETRIC;
    im.control[UMFPACK_FIXQ] = 0;
    double info[UMFPACK_INFO];
    int status = umfpack_di_qsymbolic(im.n, im.n, im.A.outerIndexPtr(), im.A.innerIndexPtr(),
                                      im.A.valuePtr(), im.q.data(), &im.symbolic, im.control,
                                      info);
    if (status != UMFPACK_OK)
      fail(ErrorCode::SingularLinearSystem, "symbolic factorization failed");
    im.store_pattern(im.A);
  }
  if (im.numeric) umfpack_di_free_numeric(&im.numeric);
  im.numeric = nullptr;
  double info[UMFPACK_INFO];
  int status = umfpack_di_numeric(im.A.outerIndexPtr(), im.A.innerIndexPtr(), im.A.valuePtr(),
                                  im.symbolic, &im.numeric, im.control, info);
  if (status == UMFPACK_WARNING_singular_matrix) return false;
  if (status != UMFPACK_OK)
    fail(ErrorCode::SingularLinearSystem, "numeric factorization failed");
  return true;
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& rhs) const {
  auto& im = *impl_;
  Eigen::VectorXd x(rhs.size());
  double info[UMFPACK_INFO];
  umfpack_di_solve(UMFPACK_A, im.A.outerIndexPtr(), im.A.innerIndexPtr(), im.A.valuePtr(),
                   x.data(), rhs.data(), im.numeric, im.control, info);
  return x;
}

#else  // Eigen fallback

struct LinearSolver::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool ok = false;
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;

bool LinearSolver::factor(const Eigen::SparseMatrix<double>& K) {
  impl_->lu.compute(K);
  impl_->ok = impl_->lu.info() == Eigen::Success;
  return impl_->ok;
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& rhs) const {
  return impl_->lu.solve(rhs);
}

#endif

}  // namespace osmium
