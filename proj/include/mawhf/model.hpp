#pragma once

#include "mawhf/linalg.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace mawhf {

/// Which half-line carries the exponential jumps and which way the drift
/// points. Upper: drift a_k < 0, exponential jumps up, mixture jumps down.
/// Lower is the mirror image (the process -xi of an upper model).
enum class Orientation { upper, lower };

inline int orientation_sign(Orientation o) { return o == Orientation::upper ? 1 : -1; }

/// One component of a jump-size mixture. Atoms carry their signed position;
/// Erlang components live on the mixture half-line, which is fixed by the
/// owning model's orientation (negative for upper models).
struct MixtureComponent {
    enum class Kind { atom, erlang };
    double weight = 1.0;
    Kind kind = Kind::erlang;
    double location = 0.0;  // atom: signed position
    double rate = 1.0;      // erlang
    int shape = 1;          // erlang
};

/// Law of a jump conditioned to fall on the mixture half-line: a finite
/// mixture of atoms and Erlang laws.
struct NegativeMixture {
    std::vector<MixtureComponent> components;

    double total_weight() const;
    /// Signed mean; `side` is -1 when the mixture lives on (-inf, 0].
    double mean(int side) const;
    /// E exp(u X) for complex u.
    Complex laplace(Complex u, int side) const;
    /// Smallest Erlang rate, +inf when there is none.
    double min_rate() const;
    bool has_nonzero_atoms() const;
    bool empty() const { return components.empty(); }
};

/// Law of the jump chi_{kr} applied when the chain moves k -> r.
struct SwitchJumpLaw {
    double atom0 = 1.0;   // P{chi = 0}
    NegativeMixture neg;  // conditional law given chi != 0, mass 1 - atom0 in total

    double mean(int side) const;
    Complex laplace(Complex u, int side) const;
};

struct ModelSpec {
    int m = 1;
    Vector nu;          // sojourn rates
    Matrix embedded;    // embedded jump chain P
    Vector a;           // drifts
    Vector b2;          // Brownian variances (must vanish)
    Vector lambda;      // jump intensities
    Vector c;           // exponential jump rates
    Vector pos_weight;  // probability a state jump is exponential
    std::vector<NegativeMixture> neg_jump;
    // switch_jump[k][r]; diagonal entries used only when embedded(k,k) > 0.
    std::vector<std::vector<SwitchJumpLaw>> switch_jump;
    bool zero_drift = false;
    Orientation orientation = Orientation::upper;

    /// Spec with chi = 0 switch jumps, no mixture jumps and zero Brownian part.
    static ModelSpec make(int m);
};

struct Violation {
    std::string field;
    std::string rule;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

ValidationReport validate_model(const ModelSpec& spec);
/// Throws DomainError carrying the report text when the spec is invalid.
void require_valid(const ModelSpec& spec);

/// Q = N (P - I).
Matrix build_generator(const ModelSpec& spec);

/// P_s = s (sI - Q)^{-1}.
Matrix resolvent_Ps(const ModelSpec& spec, double s);

struct DriftStats {
    RowVector pi;
    Matrix m_kr;  // per-transition means, equal to M1
    double m1 = 0.0;
    Matrix M1;
    Matrix P0;
};

DriftStats stationary_distribution(const ModelSpec& spec);

/// Model of -xi; an involution.
ModelSpec mirror_model(const ModelSpec& spec);

/// The f(0) matrix: P{chi_kr = 0, y_1 = r | y_0 = k}.
Matrix switch_zero_matrix(const ModelSpec& spec);

/// Diagonal matrix Lambda * Fbar_0(0): intensities of exponential jumps.
Matrix exponential_intensity(const ModelSpec& spec);

// JSON (schema "mawhf_schema": 1).
inline constexpr int kModelSchemaVersion = 1;
ModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelSpec& spec);
ModelSpec load_model(const std::string& path);

}  // namespace mawhf
