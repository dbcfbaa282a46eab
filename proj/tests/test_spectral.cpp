#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <chrono>

using namespace pitcorr;
using BK = BoundaryKind;

namespace {
FactorizationPtr fact(BK lo, BK hi, int m, double h) {
    return std::make_shared<const SpectralFactorization>(spectral_factorize(laplacian_1d(lo, hi, m, h)));
}
double recon_residual(const SpectralFactorization& f, const Eigen::MatrixXd& M) {
    return (f.Gamma * f.lambda.asDiagonal() * f.GammaInv - M).cwiseAbs().rowwise().sum().maxCoeff() /
           M.cwiseAbs().rowwise().sum().maxCoeff();
}
} // namespace

TEST_CASE("Dirichlet factorization is the orthonormal sine basis") {
    const auto f = spectral_factorize(laplacian_1d(BK::Dirichlet, BK::Dirichlet, 3, 1.0));
    CHECK((f.Gamma.transpose() * f.Gamma - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((f.GammaInv - f.Gamma.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int c = 1; c < 3; ++c) CHECK(f.lambda[c] >= f.lambda[c - 1]);
    // each column is +- sin(i k pi / 4) normalised, for some k
    for (int c = 0; c < 3; ++c) {
        bool matched = false;
        for (int k = 1; k <= 3; ++k) {
            Eigen::Vector3d s;
            for (int i = 0; i < 3; ++i) s[i] = std::sin((i + 1) * k * std::numbers::pi / 4);
            s.normalize();
            matched = matched || std::abs(std::abs(s.dot(f.Gamma.col(c))) - 1.0) < 1e-13;
        }
        CHECK(matched);
    }
}

TEST_CASE("Neumann factorization has the constant null vector") {
    const auto f = spectral_factorize(laplacian_1d(BK::Neumann, BK::Neumann, 3, 1.0));
    CHECK(std::abs(f.lambda[2]) < 1e-13);
    const Eigen::VectorXd v = f.Gamma.col(2) / f.Gamma(0, 2);
    CHECK((v - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((f.Gamma * f.GammaInv - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("reconstruction residual stays tiny up to m = 512") {
    for (int m : {2, 5, 64, 257, 512})
        for (BK lo : {BK::Dirichlet, BK::Neumann})
            for (BK hi : {BK::Dirichlet, BK::Neumann}) {
                const auto L = laplacian_1d(lo, hi, m, 1e-6);
                const auto f = spectral_factorize(L);
                INFO("m=" << m);
                CHECK(recon_residual(f, L.dense()) <= 1e-12);
                CHECK(f.lambda.maxCoeff() <= 1e-12 * L.inf_norm());
            }
}

TEST_CASE("small hand-solvable Sylvester example") {
    const auto fx = fact(BK::Dirichlet, BK::Dirichlet, 2, 1.0);
    const SylvesterOperator op(1.0, -1.0, fx, fx);
    const Eigen::MatrixXd Y = Eigen::MatrixXd::Constant(2, 2, 5.0);
    const Eigen::MatrixXd X = sylvester_solve(op, Y);
    // constant vectors satisfy Mx v = -v here, so the equation reduces to 3X = Y
    CHECK((X - Eigen::MatrixXd::Constant(2, 2, 5.0 / 3.0)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Sylvester residual and Kronecker oracle") {
    std::mt19937_64 rng(11);
    for (BK kx : {BK::Dirichlet, BK::Neumann})
        for (BK ky : {BK::Dirichlet, BK::Neumann}) {
            const Grid g = oracle::make_grid({6, 7},
                                             {AxisBC{{kx, 0}, {kx, 0}}, AxisBC{{ky, 0}, {ky, 0}}}, 0.3);
            const GridLaplacian lap(g);
            const GridFactorizations facts(lap);
            const double a = 1.7, b = -0.05;
            const auto op = facts.make_operator(a, b);
            const Eigen::MatrixXd Y = oracle::random_matrix(rng, g.rows(), g.cols(), -1, 1);
            const Eigen::MatrixXd X = op.solve(Y);
            const Eigen::MatrixXd Mx = lap.axis(0).dense(), My = lap.axis(1).dense();
            const Eigen::MatrixXd R = a * X + b * (Mx * X + X * My.transpose()) - Y;
            CHECK(R.cwiseAbs().maxCoeff() <= 1e-10 * Y.cwiseAbs().maxCoeff());
            const Eigen::MatrixXd K = a * Eigen::MatrixXd::Identity(42, 42) + b * oracle::grid_laplacian(g);
            const Eigen::VectorXd ref = oracle::solve(K, oracle::vec(Y));
            CHECK(oracle::rel_max_err(oracle::vec(X), ref) <= 1e-10);
        }
}

TEST_CASE("3D solve matches the dense oracle and is permutation consistent") {
    std::mt19937_64 rng(5);
    const Grid g = oracle::make_grid({3, 4, 5}, {oracle::neumann(), oracle::dirichlet(), oracle::mixed()}, 0.7);
    const GridLaplacian lap(g);
    const double a = 3.0, b = -0.2;
    const Eigen::MatrixXd G = oracle::random_matrix(rng, 3, 20, -1, 1);
    const Eigen::MatrixXd X = solve_3d(a, b, lap.axis(0), lap.axis(1), lap.axis(2), G);
    const Eigen::MatrixXd K = a * Eigen::MatrixXd::Identity(60, 60) + b * oracle::grid_laplacian(g);
    CHECK(oracle::rel_max_err(oracle::vec(X), oracle::solve(K, oracle::vec(G))) <= 1e-10);

    // swap the roles of x and y
    Eigen::MatrixXd Gs(4, 15), Xs_expect(4, 15);
    for (int k = 0; k < 5; ++k)
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < 3; ++i) {
                Gs(j, i + 3 * k) = G(i, j + 4 * k);
                Xs_expect(j, i + 3 * k) = X(i, j + 4 * k);
            }
    const Eigen::MatrixXd Xs = solve_3d(a, b, lap.axis(1), lap.axis(0), lap.axis(2), Gs);
    CHECK((Xs - Xs_expect).cwiseAbs().maxCoeff() <= 1e-12 * X.cwiseAbs().maxCoeff());
}

TEST_CASE("operator construction guards") {
    const auto fx = fact(BK::Neumann, BK::Neumann, 4, 1.0);
    // a = 0 with a Neumann null mode makes one denominator vanish
    CHECK_THROWS_AS(SylvesterOperator(0.0, -1.0, fx, fx), NumericalError);
    const SylvesterOperator op(1.0, -1.0, fx, fx);
    CHECK_THROWS_AS(op.solve(Eigen::MatrixXd::Zero(3, 4)), std::invalid_argument);
}

TEST_CASE("step loops do not refactorize") {
    const Grid g = oracle::make_grid({8, 9}, {oracle::neumann(), oracle::dirichlet()}, 1e-6);
    const Discretization d(g, CorrosionParameters{});
    const long f0 = instrumentation().factorizations, s0 = instrumentation().solves;
    FieldPair st{Eigen::MatrixXd::Ones(8, 9), Eigen::MatrixXd::Ones(8, 9)};
    run_rect(st, {SchemeOrder::TwoSBDF, 0.5, 4.43e8}, d, 10.0);
    const long f1 = instrumentation().factorizations;
    CHECK(f1 == f0);
    CHECK(instrumentation().solves > s0);
}

TEST_CASE("solve cost grows like m^3 on square grids") {
    std::vector<double> ms, ts;
    std::mt19937_64 rng(1);
    for (int m : {96, 192, 384}) {
        const Grid g = oracle::make_grid({m, m}, {oracle::neumann(), oracle::neumann()}, 1e-6);
        const GridFactorizations facts{GridLaplacian(g)};
        const auto op = facts.make_operator(1.0, -1e-15);
        const Eigen::MatrixXd Y = oracle::random_matrix(rng, m, m);
        Eigen::MatrixXd X;
        SolveWorkspace ws;
        double best = 1e300;
        for (int rep = 0; rep < 5; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            const int inner = std::max(1, 40000000 / (m * m * m));
            for (int k = 0; k < inner; ++k) op.solve(Y, X, ws);
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / inner);
        }
        ms.push_back(m);
        ts.push_back(best);
    }
    const double slope = loglog_slope(ms, ts);
    INFO("slope " << slope);
    CHECK(slope >= 2.5);
    CHECK(slope <= 3.5);
}
