#pragma once

#include "satgr/ring.hpp"

#include <optional>
#include <vector>

namespace satgr {

/// Dense matrix over one Ring. Columns play the role of module generators
/// throughout, with rows indexed by ambient coordinates.
class Mat {
public:
    Mat() : rows_(0), cols_(0) {}
    Mat(const Ring& ring, int rows, int cols)
        : ring_(ring), rows_(rows), cols_(cols),
          data_(static_cast<size_t>(rows) * static_cast<size_t>(cols), Elem::zero(ring)) {}

    static Mat identity(const Ring& ring, int n);
    static Mat from_columns(const Ring& ring, int rows, const std::vector<std::vector<Elem>>& cols);

    const Ring& ring() const { return ring_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Elem& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const Elem& at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    std::vector<Elem> column(int c) const;
    void set_column(int c, const std::vector<Elem>& v);

    Mat hstack(const Mat& o) const;
    Mat submat_cols(int c0, int c1) const;  // columns [c0, c1)
    Mat mul(const Mat& o) const;
    bool is_zero() const;
    bool operator==(const Mat& o) const;

    std::string to_string() const;

private:
    Ring ring_;
    int rows_, cols_;
    std::vector<Elem> data_;
};

/// Canonical column form of a matrix together with kernel generators.
///
/// basis spans colspan(M) canonically: reduced column echelon over fields,
/// column Hermite form with positive pivots over Z, unit-pivot reduction
/// followed by a chain form on the residual over local rings, and a Z-lift
/// Howell-style form over Z/n. pivot_rows ascend; unit_pivot flags the
/// columns whose pivot entry is invertible.
struct EchelonResult {
    Mat basis;
    std::vector<int> pivot_rows;
    std::vector<bool> unit_pivot;
    Mat kernel;
    bool complete = true;  // every pivot is a unit (pivot 1 over Z)

    int rank() const { return basis.cols(); }
};

EchelonResult echelon(const Mat& M, bool with_kernel = true);

/// Structure of R^ambient_rank / colspan(M).
struct CokerResult {
    int free_rank = 0;
    std::vector<Elem> invariants;  // nonzero nonunit annihilator invariants
    bool is_flat = true;           // cokernel is free
};

CokerResult coker_structure(const Mat& M, int ambient_rank);

/// Smith form D = U * M * W over Z or over a chain ring (NilpotentExt of a
/// field). U and W are invertible, tracked together with their inverses.
struct SmithResult {
    Mat D, U, Uinv, W, Winv;
    std::vector<Elem> diag;  // normalized diagonal of D
};

SmithResult smith(const Mat& M);

Elem det(const Mat& M);

/// Coordinates x with M x = b, if b lies in colspan(M).
std::optional<std::vector<Elem>> solve_in_span(const Mat& M, const std::vector<Elem>& b);

/// Coordinates of b in colspan(M) modulo colspan(D): solves [M | D] x = b and
/// returns the M-block of x.
std::optional<std::vector<Elem>> solve_mod(const Mat& M, const Mat& D,
                                           const std::vector<Elem>& b);

/// Canonical columns completing colspan(M) to R^rows. Requires independent
/// columns and free cokernel; deterministic and invariant under the
/// presentation of the span.
Mat canonical_complement(const Mat& M);

}  // namespace satgr
