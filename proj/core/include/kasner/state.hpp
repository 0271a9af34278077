#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "kasner/background.hpp"
#include "kasner/errors.hpp"

namespace kasner {

using cplx = std::complex<double>;

// Symmetric-pair index: (0,0)(0,1)(0,2)(1,1)(1,2)(2,2) -> 0..5.
inline constexpr int kSymIdx[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

enum class GaugeType { Cmc, Parabolic };

struct GaugeTag {
    GaugeType type = GaugeType::Cmc;
    double lambda = 0.0; // parabolic gauge parameter (only if Parabolic)

    static GaugeTag cmc() { return {GaugeType::Cmc, 0.0}; }
    static GaugeTag parabolic(double lambda);
    bool is_parabolic() const { return type == GaugeType::Parabolic; }
    // The energy-monotonicity statements for the parabolic family are
    // proved for lambda >= 3.
    bool monotone_regime() const {
        return type == GaugeType::Parabolic && lambda >= 3.0;
    }
    double inv_lambda() const { return is_parabolic() ? 1.0 / lambda : 0.0; }
    std::string name() const;
};

// Integer wave vector on T^3 (coordinate side length 2 pi), |k_j| <= k_max.
struct ModeIndex {
    std::array<int, 3> k{0, 0, 0};

    int operator[](int j) const { return k[j]; }
    bool is_zero() const { return k[0] == 0 && k[1] == 0 && k[2] == 0; }
    int norm_sq() const { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }
    ModeIndex negated() const { return {{-k[0], -k[1], -k[2]}}; }
    bool operator==(const ModeIndex& o) const { return k == o.k; }
};

// Dense cube lattice {-k_max..k_max}^3 in row-major order.
class ModeLattice {
  public:
    explicit ModeLattice(int k_max) : k_max_(k_max) {
        const int n = 2 * k_max + 1;
        size_ = n * n * n;
    }

    int k_max() const { return k_max_; }
    int size() const { return size_; }

    ModeIndex at(int idx) const {
        const int n = 2 * k_max_ + 1;
        return {{idx / (n * n) - k_max_, (idx / n) % n - k_max_,
                 idx % n - k_max_}};
    }
    int index_of(const ModeIndex& m) const {
        const int n = 2 * k_max_ + 1;
        return ((m[0] + k_max_) * n + (m[1] + k_max_)) * n + (m[2] + k_max_);
    }
    int conjugate_index(int idx) const { return index_of(at(idx).negated()); }

    // True for k = 0 and for the lexicographically positive member of each
    // {k, -k} pair; the other member holds the complex conjugate data.
    bool is_primary(int idx) const {
        const ModeIndex m = at(idx);
        if (m[0] != 0) return m[0] > 0;
        if (m[1] != 0) return m[1] > 0;
        return m[2] >= 0;
    }

  private:
    int k_max_;
    int size_;
};

// Fourier coefficients of the linearized unknowns at one wave vector:
//   gamma: metric perturbation (symmetric, lower indices),
//   kmix:  rescaled second-fundamental-form perturbation t K^i_j (mixed),
//   psi:   scalar-field perturbation,
//   chi:   t d/dt psi - A nu (the evolved scalar momentum combination),
//   nu:    lapse perturbation n - 1.
struct ModeState {
    std::array<cplx, 6> gamma{};
    std::array<cplx, 9> kmix{}; // row-major K^i_j = kmix[3*i + j]
    cplx psi{};
    cplx chi{};
    cplx nu{};

    cplx g(int i, int j) const { return gamma[kSymIdx[i][j]]; }
    cplx K(int i, int j) const { return kmix[3 * i + j]; }
    cplx& Kref(int i, int j) { return kmix[3 * i + j]; }
    cplx trace_K() const { return kmix[0] + kmix[4] + kmix[8]; }
    cplx tdtpsi(double A) const { return chi + A * nu; }

    ModeState conjugated() const;
    ModeState& operator+=(const ModeState& o);
    ModeState& operator*=(double a);
};

// Band-limited state of the full linearized system at one time.
struct FieldState {
    double t = 1.0;
    KasnerBackground bg = KasnerBackground::flrw();
    GaugeTag gauge = GaugeTag::cmc();
    ModeLattice lattice{0};
    std::vector<ModeState> modes;

    FieldState() { modes.resize(1); }
    FieldState(const KasnerBackground& b, GaugeTag g, int k_max, double t0)
        : t(t0), bg(b), gauge(g), lattice(k_max) {
        modes.resize(static_cast<size_t>(lattice.size()));
    }

    double tau() const; // ln t

    // Enforce coefficient(-k) = conj(coefficient(k)) by pair-averaging
    // (physical fields are real-valued).
    void enforce_hermitian();
    // Max pair deviation from Hermitian symmetry (diagnostic).
    double hermitian_defect() const;
};

// Snapshot serialization (schema: {t, gauge, bg:{q,A,sigma}, modes:[...]}).
std::string snapshot_to_json(const FieldState& st);
FieldState snapshot_from_json(const std::string& text);

} // namespace kasner
