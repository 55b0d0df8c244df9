#include "fvrb/reduced.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fvrb {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::VectorXd gather(const Eigen::VectorXd& x, const std::vector<int>& nodes) {
    Eigen::VectorXd out(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[nodes[i]];
    return out;
}

std::vector<std::vector<int>> singleton_groups(int n) {
    std::vector<std::vector<int>> g(n);
    for (int i = 0; i < n; ++i) g[i] = {i};
    return g;
}

}  // namespace

bool ReducedBasis::compressed() const {
    return std::any_of(groups.begin(), groups.end(),
                       [](const std::vector<int>& g) { return g.size() != 1; });
}

ReducedBasis offline(const TransportOperator& op, const ChannelGrid& grid,
                     const CatalyticIndex& cat, const OfflineOptions& opts) {
    const auto t0 = Clock::now();
    const int nc = cat.size();
    const int ns = op.n_species();

    ReducedBasis basis;
    basis.level = grid.level;
    basis.n_species = ns;
    basis.diffusion = op.diffusion();
    basis.v_in = op.velocity().param;
    basis.sigma = cat.sigma;
    basis.nodes = cat.nodes;
    basis.groups = singleton_groups(nc);

    basis.y0_trace.resize(ns, nc);
    if (op.has_source() || !op.constants_in_kernel()) {
        for (int s = 0; s < ns; ++s) {
            Eigen::VectorXd x0 = op.solve(op.b0().col(s));
            if (!x0.allFinite()) throw std::runtime_error("offline: reaction-free solve failed");
            basis.y0_trace.row(s) = gather(x0, cat.nodes).transpose();
        }
    } else {
        // Constant inlet, no source: the reaction-free solution is the
        // inlet state and needs no solve.
        for (int s = 0; s < ns; ++s) basis.y0_trace.row(s).setConstant(op.y_in()[s]);
    }

    basis.G.resize(nc, nc);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op.n());
    for (int k = 0; k < nc; ++k) {
        const int node = cat.nodes[k];
        if (!op.is_dirichlet(node)) rhs[node] = -cat.sigma[k];
        Eigen::VectorXd x = op.solve(rhs);
        rhs[node] = 0.0;
        if (!x.allFinite())
            throw std::runtime_error("offline: basis solve failed for catalytic index " +
                                     std::to_string(k) + " (node " + std::to_string(node) + ")");
        basis.G.col(k) = gather(x, cat.nodes);
        if (opts.keep_fields) basis.basis_fields.push_back(std::move(x));
    }

    basis.offline_time = seconds_since(t0);
    return basis;
}

namespace {

struct OnlineSystem {
    const ReducedBasis& basis;
    const ReactionModel& model;
    Eigen::VectorXd group_weight;  // total sigma per group

    explicit OnlineSystem(const ReducedBasis& b, const ReactionModel& m) : basis(b), model(m) {
        group_weight.resize(b.n_basis());
        for (int g = 0; g < b.n_basis(); ++g) {
            double w = 0.0;
            for (int p : b.groups[g]) w += b.sigma[p];
            group_weight[g] = w;
        }
    }

    // Species values at every collocation point for the given coefficients.
    Eigen::MatrixXd traces(const Eigen::VectorXd& alpha) const {
        const Eigen::VectorXd galpha = basis.G * alpha;
        Eigen::MatrixXd yhat = basis.y0_trace;
        for (int s = 0; s < basis.n_species; ++s)
            yhat.row(s) += (-model.nu[s]) * galpha.transpose();
        return yhat;
    }

    Eigen::VectorXd residual(const Eigen::VectorXd& alpha, Eigen::MatrixXd* yhat_out = nullptr) const {
        const Eigen::MatrixXd yhat = traces(alpha);
        Eigen::VectorXd rates(basis.n_cat());
        std::vector<double> y(basis.n_species);
        for (int l = 0; l < basis.n_cat(); ++l) {
            for (int s = 0; s < basis.n_species; ++s) y[s] = yhat(s, l);
            rates[l] = model.rate(y);
        }
        Eigen::VectorXd f(basis.n_basis());
        for (int g = 0; g < basis.n_basis(); ++g) {
            double acc = 0.0;
            for (int p : basis.groups[g]) acc += basis.sigma[p] * rates[p];
            f[g] = alpha[g] - acc / group_weight[g];
        }
        if (yhat_out) *yhat_out = yhat;
        return f;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& alpha) const {
        const Eigen::MatrixXd yhat = traces(alpha);
        const int nb = basis.n_basis();
        Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(nb, nb);
        std::vector<double> y(basis.n_species), grad(basis.n_species);
        for (int g = 0; g < nb; ++g) {
            for (int p : basis.groups[g]) {
                for (int s = 0; s < basis.n_species; ++s) y[s] = yhat(s, p);
                model.rate_grad(y, grad);
                double chain = 0.0;
                for (int s = 0; s < basis.n_species; ++s) chain += grad[s] * (-model.nu[s]);
                // d rate(p) / d alpha_m = chain * G(p, m)
                jac.row(g) -= (basis.sigma[p] * chain / group_weight[g]) * basis.G.row(p);
            }
        }
        return jac;
    }
};

struct NewtonOutcome {
    bool converged = false;
    int iters = 0;
    double residual = 0.0;
    std::string history;
};

NewtonOutcome newton_dense(const OnlineSystem& sys, Eigen::VectorXd& alpha,
                           const NewtonOptions& opts) {
    NewtonOutcome out;
    std::ostringstream hist;
    Eigen::VectorXd f = sys.residual(alpha);
    double phi = 0.5 * f.squaredNorm();
    for (int it = 1;; ++it) {
        double rnorm = f.lpNorm<Eigen::Infinity>();
        hist << "  it " << it << ": |F|_inf = " << rnorm << "\n";
        if (rnorm <= opts.ftol) {
            // One best-effort polish step pushes the residual to the
            // linear-solve floor so that the algebraic flux identities hold
            // well below the tolerance. Counted like any other iteration.
            if (rnorm > 1e-2 * opts.ftol) {
                Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.jacobian(alpha));
                const Eigen::VectorXd trial = alpha + lu.solve(-f);
                const Eigen::VectorXd f_trial = sys.residual(trial);
                if (trial.allFinite() && f_trial.lpNorm<Eigen::Infinity>() < rnorm) {
                    alpha = trial;
                    rnorm = f_trial.lpNorm<Eigen::Infinity>();
                    ++it;
                    hist << "  it " << it << ": |F|_inf = " << rnorm << " (polish)\n";
                }
            }
            out.converged = true;
            out.iters = it;
            out.residual = rnorm;
            out.history = hist.str();
            return out;
        }
        if (it >= opts.max_iters) {
            out.iters = it;
            out.residual = rnorm;
            out.history = hist.str();
            return out;
        }

        Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.jacobian(alpha));
        const Eigen::VectorXd step = lu.solve(-f);
        if (!step.allFinite()) {
            out.iters = it;
            out.residual = rnorm;
            out.history = hist.str() + "  singular Jacobian\n";
            return out;
        }

        double lam = std::min(1.0, opts.damp_initial * std::pow(opts.damp_growth, it - 1));
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            const Eigen::VectorXd trial = alpha + lam * step;
            const Eigen::VectorXd f_trial = sys.residual(trial);
            const double phi_trial = 0.5 * f_trial.squaredNorm();
            if (phi_trial <= (1.0 - 2.0 * opts.armijo_c * lam) * phi) {
                alpha = trial;
                f = f_trial;
                phi = phi_trial;
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if (!accepted) {
            out.iters = it;
            out.residual = rnorm;
            out.history = hist.str() + "  line search stalled\n";
            return out;
        }
    }
}

}  // namespace

ReducedSolution online(const ReducedBasis& basis, const ReactionModel& model,
                       const NewtonOptions& opts) {
    if (model.n_species != basis.n_species)
        throw std::invalid_argument("online: reaction model has " + std::to_string(model.n_species) +
                                    " species, basis has " + std::to_string(basis.n_species));
    if (static_cast<int>(model.nu.size()) != model.n_species)
        throw std::invalid_argument("online: stoichiometric vector length mismatch");

    const auto t0 = Clock::now();
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(basis.n_basis());

    OnlineSystem sys(basis, model);
    NewtonOutcome outcome = newton_dense(sys, alpha, opts);
    int total_iters = outcome.iters;

    if (!outcome.converged && opts.continuation_fallback) {
        // Rate-scaling continuation: solve a strongly damped reaction first
        // and warm-start towards the target model.
        alpha.setZero();
        std::string hist = std::move(outcome.history);
        for (double factor : {1e-2, 1e-1, 1.0}) {
            const ReactionModel scaled = scale_rate(model, factor);
            OnlineSystem sys_scaled(basis, scaled);
            outcome = newton_dense(sys_scaled, alpha, opts);
            total_iters += outcome.iters;
            hist += "continuation factor " + std::to_string(factor) + ":\n" + outcome.history;
            if (!outcome.converged) break;
        }
        outcome.history = std::move(hist);
    }
    if (!outcome.converged) {
        throw std::runtime_error("online: Newton did not converge within " +
                                 std::to_string(opts.max_iters) + " iterations (|F|_inf = " +
                                 std::to_string(outcome.residual) + ")\niteration history:\n" +
                                 outcome.history);
    }

    ReducedSolution sol;
    sol.alpha = alpha;
    sol.boundary_trace = sys.traces(alpha);
    sol.nu = model.nu;
    sol.newton_iters = total_iters;
    sol.residual_norm = outcome.residual;
    sol.negative_trace = (sol.boundary_trace.array() < 0.0).any();
    sol.online_time = seconds_since(t0);
    return sol;
}

Eigen::VectorXd online_residual(const ReducedBasis& basis, const ReactionModel& model,
                                const Eigen::VectorXd& alpha) {
    return OnlineSystem(basis, model).residual(alpha);
}

Eigen::MatrixXd online_jacobian(const ReducedBasis& basis, const ReactionModel& model,
                                const Eigen::VectorXd& alpha) {
    return OnlineSystem(basis, model).jacobian(alpha);
}

ReducedBasis compress(const ReducedBasis& basis, const std::vector<std::vector<int>>& groups) {
    if (basis.compressed())
        throw std::invalid_argument("compress: basis is already compressed");
    const int nc = basis.n_cat();
    std::vector<char> seen(nc, 0);
    for (const auto& g : groups) {
        if (g.empty()) throw std::invalid_argument("compress: empty group");
        for (int p : g) {
            if (p < 0 || p >= nc || seen[p])
                throw std::invalid_argument("compress: groups must partition the catalytic nodes");
            seen[p] = 1;
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw std::invalid_argument("compress: groups must cover every catalytic node");

    ReducedBasis out = basis;
    out.basis_fields.clear();
    out.groups = groups;
    out.G.resize(nc, static_cast<Eigen::Index>(groups.size()));
    for (size_t g = 0; g < groups.size(); ++g) {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(nc);
        for (int p : groups[g]) col += basis.G.col(p);
        out.G.col(static_cast<Eigen::Index>(g)) = col;
    }
    return out;
}

Eigen::MatrixXd reconstruct(const TransportOperator& op, const ReducedBasis& basis,
                            const ReducedSolution& sol) {
    if (basis.nodes.empty())
        throw std::invalid_argument("reconstruct: basis carries no node mapping");
    if (op.n_species() != basis.n_species)
        throw std::invalid_argument("reconstruct: operator species count mismatch");
    if (sol.alpha.size() != basis.n_basis())
        throw std::invalid_argument("reconstruct: solution does not match basis size");

    // Superposed basis right-hand side sum_K alpha_K b_K; the b_K are
    // regenerated from sigma, not stored.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op.n());
    for (int g = 0; g < basis.n_basis(); ++g) {
        for (int p : basis.groups[g]) {
            const int node = basis.nodes[p];
            if (!op.is_dirichlet(node)) rhs[node] -= basis.sigma[p] * sol.alpha[g];
        }
    }
    const Eigen::VectorXd w = op.solve(rhs);
    if (!w.allFinite()) throw std::runtime_error("reconstruct: linear solve failed");

    const int ns = basis.n_species;
    Eigen::MatrixXd fields(op.n(), ns);
    const bool trivial_y0 = !op.has_source() && op.constants_in_kernel();
    for (int s = 0; s < ns; ++s) {
        if (trivial_y0)
            fields.col(s).setConstant(op.y_in()[s]);
        else
            fields.col(s) = op.solve(op.b0().col(s));
        fields.col(s) += (-sol.nu[s]) * w;
    }
    return fields;
}

namespace {

void write_row(std::ostream& os, const double* data, Eigen::Index n) {
    os.precision(17);
    for (Eigen::Index i = 0; i < n; ++i) os << (i ? "," : "") << data[i];
    os << '\n';
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> vals;
    std::istringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    return vals;
}

}  // namespace

void save_basis(const ReducedBasis& basis, const std::string& path) {
    if (basis.compressed())
        throw std::invalid_argument("save_basis: only uncompressed bases are serialized");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_basis: cannot open " + path);
    os << "fvrb-basis,1\n";
    os << "level," << basis.level << '\n';
    os << "n_cat," << basis.n_cat() << '\n';
    os << "n_species," << basis.n_species << '\n';
    os.precision(17);
    os << "D," << basis.diffusion << '\n';
    os << "v_in," << basis.v_in << '\n';
    os << "G\n";
    for (int l = 0; l < basis.n_cat(); ++l) {
        Eigen::RowVectorXd row = basis.G.row(l);
        write_row(os, row.data(), row.size());
    }
    os << "y0_trace\n";
    for (int s = 0; s < basis.n_species; ++s) {
        Eigen::RowVectorXd row = basis.y0_trace.row(s);
        write_row(os, row.data(), row.size());
    }
    os << "sigma\n";
    write_row(os, basis.sigma.data(), static_cast<Eigen::Index>(basis.sigma.size()));
    os << "nodes\n";
    for (size_t i = 0; i < basis.nodes.size(); ++i) os << (i ? "," : "") << basis.nodes[i];
    os << '\n';
    if (!os) throw std::runtime_error("save_basis: write to " + path + " failed");
}

ReducedBasis load_basis(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_basis: cannot open " + path);
    std::string line;
    auto next = [&]() -> std::string {
        if (!std::getline(is, line)) throw std::runtime_error("load_basis: truncated file " + path);
        return line;
    };
    if (next() != "fvrb-basis,1") throw std::runtime_error("load_basis: unrecognized header in " + path);

    auto header_value = [&](const std::string& key) -> std::string {
        const std::string l = next();
        if (l.rfind(key + ",", 0) != 0)
            throw std::runtime_error("load_basis: expected '" + key + "' in " + path);
        return l.substr(key.size() + 1);
    };

    ReducedBasis basis;
    basis.level = std::stoi(header_value("level"));
    const int nc = std::stoi(header_value("n_cat"));
    basis.n_species = std::stoi(header_value("n_species"));
    basis.diffusion = std::stod(header_value("D"));
    basis.v_in = std::stod(header_value("v_in"));

    auto expect = [&](const std::string& tag) {
        if (next() != tag) throw std::runtime_error("load_basis: expected section '" + tag + "'");
    };

    expect("G");
    basis.G.resize(nc, nc);
    for (int l = 0; l < nc; ++l) {
        const auto vals = parse_row(next());
        if (static_cast<int>(vals.size()) != nc) throw std::runtime_error("load_basis: bad G row");
        for (int k = 0; k < nc; ++k) basis.G(l, k) = vals[k];
    }
    expect("y0_trace");
    basis.y0_trace.resize(basis.n_species, nc);
    for (int s = 0; s < basis.n_species; ++s) {
        const auto vals = parse_row(next());
        if (static_cast<int>(vals.size()) != nc) throw std::runtime_error("load_basis: bad y0 row");
        for (int l = 0; l < nc; ++l) basis.y0_trace(s, l) = vals[l];
    }
    expect("sigma");
    basis.sigma = parse_row(next());
    if (static_cast<int>(basis.sigma.size()) != nc) throw std::runtime_error("load_basis: bad sigma row");
    expect("nodes");
    {
        const auto vals = parse_row(next());
        if (static_cast<int>(vals.size()) != nc) throw std::runtime_error("load_basis: bad nodes row");
        basis.nodes.assign(vals.size(), 0);
        for (size_t i = 0; i < vals.size(); ++i) basis.nodes[i] = static_cast<int>(vals[i]);
    }
    basis.groups = singleton_groups(nc);
    return basis;
}

}  // namespace fvrb
