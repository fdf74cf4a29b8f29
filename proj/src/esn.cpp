#include "jamguard/esn.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "jamguard/error.hpp"
#include "jamguard/rng.hpp"

namespace jamguard {

void EsnParams::validate() const {
    if (input_dim < 1 || reservoir_size < 1 || output_dim < 1) throw ConfigError("esn: dimensions must be >= 1");
    if (!(density > 0 && density <= 1)) throw ConfigError("esn: density must be in (0,1]");
    if (!(spectral_radius > 0)) throw ConfigError("esn: spectral radius must be > 0");
    if (!(input_scale >= 0)) throw ConfigError("esn: input scale must be >= 0");
    if (!(ridge >= 0)) throw ConfigError("esn: ridge must be >= 0");
}

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    if (solver.info() != Eigen::Success) throw Error("eigenvalue computation failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

EsnModel init_esn(const EsnParams& params) {
    params.validate();
    EsnModel m;
    m.params = params;
    const auto M = params.reservoir_size, D = params.input_dim, K = params.output_dim;

    Rng in_rng(derive_seed(params.seed, 0));
    m.w_in.resize(M, D);
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = 0; j < D; ++j) m.w_in(i, j) = in_rng.uniform(-params.input_scale, params.input_scale);

    for (int attempt = 0;; ++attempt) {
        Rng res_rng(derive_seed(params.seed, 1 + static_cast<std::uint64_t>(attempt)));
        m.w_res = Eigen::MatrixXd::Zero(M, M);
        for (Eigen::Index i = 0; i < M; ++i)
            for (Eigen::Index j = 0; j < M; ++j)
                if (res_rng.uniform(0.0, 1.0) < params.density) m.w_res(i, j) = res_rng.uniform(-1.0, 1.0);
        const double rho = m.w_res.isZero(0.0) ? 0.0 : spectral_radius(m.w_res);
        if (rho > 1e-12) {
            m.w_res *= params.spectral_radius / rho;
            break;
        }
        if (attempt >= 1000) throw Error("esn: could not draw a reservoir with non-zero spectral radius");
        ++m.reservoir_resamples;
    }

    if (params.feedback) {
        Rng fb_rng(derive_seed(params.seed, 0xfeedULL << 32));
        m.w_fb.resize(M, K);
        for (Eigen::Index i = 0; i < M; ++i)
            for (Eigen::Index j = 0; j < K; ++j)
                m.w_fb(i, j) = fb_rng.uniform(-params.feedback_scale, params.feedback_scale);
    }
    return m;
}

namespace {

void activate(Eigen::VectorXd& v, Activation a) {
    if (a == Activation::Tanh) v = v.array().tanh();
}

}  // namespace

Eigen::MatrixXd EsnModel::states(const Eigen::MatrixXd& steps, const std::optional<Eigen::MatrixXd>& previous_outputs) const {
    const auto M = params.reservoir_size;
    if (steps.cols() != params.input_dim)
        throw DomainError("esn: window has " + std::to_string(steps.cols()) + " features, expected " +
                          std::to_string(params.input_dim));
    const bool use_fb = w_fb.size() != 0;
    if (use_fb && previous_outputs && (previous_outputs->rows() != params.output_dim || previous_outputs->cols() < steps.rows()))
        throw DomainError("esn: teacher signal has the wrong shape");
    if (use_fb && !previous_outputs && !fitted()) throw StateError("esn: output feedback requires a fitted readout");

    Eigen::MatrixXd out(M, steps.rows());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(M);
    Eigen::VectorXd s_prev = Eigen::VectorXd::Zero(params.output_dim);
    for (Eigen::Index t = 0; t < steps.rows(); ++t) {
        Eigen::VectorXd pre = w_res * x + w_in * steps.row(t).transpose();
        if (use_fb) pre += w_fb * s_prev;
        activate(pre, params.activation);
        x = pre;
        out.col(t) = x;
        if (use_fb) s_prev = previous_outputs ? Eigen::VectorXd(previous_outputs->col(t)) : Eigen::VectorXd(w_out * x);
    }
    return out;
}

Eigen::VectorXd EsnModel::output(const Eigen::MatrixXd& steps) const {
    if (!fitted()) throw StateError("esn: readout is not fitted");
    if (steps.rows() == 0) throw DomainError("esn: empty window");
    Eigen::MatrixXd x = states(steps);
    return w_out * x.col(x.cols() - 1);
}

double EsnModel::score(const Eigen::MatrixXd& steps) const {
    Eigen::VectorXd y = output(steps);
    if (y.size() < 2) throw StateError("esn: score needs two outputs");
    // softmax positive component = logistic(y1 - y0)
    const double d = y[1] - y[0];
    return d >= 0 ? 1.0 / (1.0 + std::exp(-d)) : std::exp(d) / (1.0 + std::exp(d));
}

Eigen::MatrixXd fit_readout(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets, double lambda) {
    if (states.cols() < 1) throw ConfigError("fit_readout: no training columns");
    if (states.cols() != targets.cols()) throw ConfigError("fit_readout: states and targets differ in length");
    if (!(lambda >= 0)) throw ConfigError("fit_readout: lambda must be >= 0");
    const auto M = states.rows();
    Eigen::MatrixXd gram = states * states.transpose();
    gram.diagonal().array() += lambda;
    Eigen::MatrixXd rhs = states * targets.transpose();  // M x K
    if (lambda == 0.0) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
        if (!lu.isInvertible())
            throw DomainError("fit_readout: X X^T is singular; use a ridge lambda > 0");
        return lu.solve(rhs).transpose();
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) throw DomainError("fit_readout: factorization failed");
    Eigen::MatrixXd w = llt.solve(rhs).transpose();
    (void)M;
    return w;
}

void train_esn(EsnModel& model, std::span<const SequenceWindow> windows) {
    if (windows.empty()) throw ConfigError("train_esn: no windows");
    const auto K = model.params.output_dim;
    if (K != 2) throw ConfigError("train_esn: binary detection requires two outputs");
    Eigen::MatrixXd X(model.params.reservoir_size, static_cast<Eigen::Index>(windows.size()));
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(K, static_cast<Eigen::Index>(windows.size()));
    const bool use_fb = model.w_fb.size() != 0;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        if (w.steps.rows() < 1) throw ConfigError("train_esn: empty window");
        Eigen::VectorXd target = Eigen::VectorXd::Zero(K);
        target[w.label ? 1 : 0] = 1.0;
        std::optional<Eigen::MatrixXd> teacher;
        if (use_fb) teacher = target.replicate(1, w.steps.rows());
        Eigen::MatrixXd st = model.states(w.steps, teacher);
        X.col(static_cast<Eigen::Index>(i)) = st.col(st.cols() - 1);
        Y.col(static_cast<Eigen::Index>(i)) = target;
    }
    model.w_out = fit_readout(X, Y, model.params.ridge);
}

std::vector<SequenceWindow> build_windows(const LabeledDataset& ds, const FeatureMatrix& normalized,
                                          std::span<const std::size_t> rows, std::size_t k) {
    if (k < 1) throw ConfigError("build_windows: k must be >= 1");
    if (static_cast<std::size_t>(normalized.rows()) != ds.size())
        throw ConfigError("build_windows: feature matrix does not match dataset");
    std::vector<std::size_t> segment_start(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const bool continues = i > 0 && ds.rows[i].scenario_id == ds.rows[i - 1].scenario_id &&
                               ds.rows[i].label == ds.rows[i - 1].label;
        segment_start[i] = continues ? segment_start[i - 1] : i;
    }
    std::vector<SequenceWindow> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= ds.size()) throw ConfigError("build_windows: row out of range");
        SequenceWindow w;
        w.steps.resize(static_cast<Eigen::Index>(k), normalized.cols());
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t back = k - 1 - j;
            const std::size_t src = r >= segment_start[r] + back ? r - back : segment_start[r];
            w.steps.row(static_cast<Eigen::Index>(j)) = normalized.row(static_cast<Eigen::Index>(src));
        }
        w.label = static_cast<int>(ds.rows[r].label);
        out.push_back(std::move(w));
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void write_block(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::uint64_t bits = std::bit_cast<std::uint64_t>(m(i, j));
            unsigned char bytes[8];
            for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
            out.write(reinterpret_cast<const char*>(bytes), 8);
        }
}

Eigen::MatrixXd read_block(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            unsigned char bytes[8];
            if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ParseError("esn file truncated");
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
            m(i, j) = std::bit_cast<double>(bits);
        }
    return m;
}

}  // namespace

void save_esn(std::ostream& out, const EsnModel& m, const nlohmann::json& extra) {
    const auto& p = m.params;
    nlohmann::json blocks = nlohmann::json::array();
    auto add = [&](const char* name, const Eigen::MatrixXd& b) {
        blocks.push_back({{"name", name}, {"rows", b.rows()}, {"cols", b.cols()}});
    };
    add("w_in", m.w_in);
    add("w_res", m.w_res);
    if (m.w_fb.size()) add("w_fb", m.w_fb);
    if (m.fitted()) add("w_out", m.w_out);
    nlohmann::json header = {{"format", "jamguard.esn"},
                             {"version", 1},
                             {"input_dim", p.input_dim},
                             {"reservoir_size", p.reservoir_size},
                             {"output_dim", p.output_dim},
                             {"spectral_radius", p.spectral_radius},
                             {"density", p.density},
                             {"input_scale", p.input_scale},
                             {"feedback", p.feedback},
                             {"feedback_scale", p.feedback_scale},
                             {"activation", p.activation == Activation::Tanh ? "tanh" : "identity"},
                             {"ridge", p.ridge},
                             {"seed", p.seed},
                             {"reservoir_resamples", m.reservoir_resamples},
                             {"byte_order", "little"},
                             {"layout", "row_major_float64"},
                             {"blocks", blocks}};
    if (extra.is_object())
        for (const auto& [k, v] : extra.items()) header[k] = v;
    out << header.dump() << '\n';
    write_block(out, m.w_in);
    write_block(out, m.w_res);
    if (m.w_fb.size()) write_block(out, m.w_fb);
    if (m.fitted()) write_block(out, m.w_out);
}

void save_esn(const std::string& path, const EsnModel& m, const nlohmann::json& extra) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    save_esn(out, m, extra);
}

EsnModel load_esn(std::istream& in, nlohmann::json* header_out) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("esn file is empty");
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("esn header: ") + e.what(), 1);
    }
    EsnModel m;
    try {
        if (h.at("format").get<std::string>() != "jamguard.esn" || h.at("version").get<int>() != 1)
            throw SchemaError("not a version-1 jamguard ESN file");
        auto& p = m.params;
        p.input_dim = h.at("input_dim").get<Eigen::Index>();
        p.reservoir_size = h.at("reservoir_size").get<Eigen::Index>();
        p.output_dim = h.at("output_dim").get<Eigen::Index>();
        p.spectral_radius = h.at("spectral_radius").get<double>();
        p.density = h.at("density").get<double>();
        p.input_scale = h.at("input_scale").get<double>();
        p.feedback = h.at("feedback").get<bool>();
        p.feedback_scale = h.at("feedback_scale").get<double>();
        p.activation = h.at("activation").get<std::string>() == "tanh" ? Activation::Tanh : Activation::Identity;
        p.ridge = h.at("ridge").get<double>();
        p.seed = h.at("seed").get<std::uint64_t>();
        m.reservoir_resamples = h.value("reservoir_resamples", 0);
        for (const auto& b : h.at("blocks")) {
            const std::string name = b.at("name").get<std::string>();
            const auto rows = b.at("rows").get<Eigen::Index>(), cols = b.at("cols").get<Eigen::Index>();
            Eigen::MatrixXd block = read_block(in, rows, cols);
            if (name == "w_in") m.w_in = std::move(block);
            else if (name == "w_res") m.w_res = std::move(block);
            else if (name == "w_fb") m.w_fb = std::move(block);
            else if (name == "w_out") m.w_out = std::move(block);
            else throw SchemaError("unknown ESN block '" + name + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("esn header: ") + e.what(), 1);
    }
    const auto M = m.params.reservoir_size;
    if (m.w_in.rows() != M || m.w_in.cols() != m.params.input_dim || m.w_res.rows() != M || m.w_res.cols() != M ||
        (m.fitted() && (m.w_out.rows() != m.params.output_dim || m.w_out.cols() != M)))
        throw SchemaError("esn block shapes do not match the header");
    if (header_out) *header_out = h;
    return m;
}

EsnModel load_esn(const std::string& path, nlohmann::json* header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StateError("cannot open ESN model '" + path + "'");
    return load_esn(in, header);
}

}  // namespace jamguard
