#include "bisurf/operator.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bisurf {

namespace {

constexpr int kSteps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

std::string node_str(int i, int j) {
    std::ostringstream os;
    os << "(" << i << "," << j << ")";
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------
// SurfaceField / BoundaryData / GaussianLoad
// ---------------------------------------------------------------------------

SurfaceField::SurfaceField(const MaskedGrid& grid)
    : grid_(&grid), values_(grid.node_count(), std::numeric_limits<double>::quiet_NaN()) {
    for (int id = 0; id < grid.node_count(); ++id)
        if (grid.inside(id)) values_[id] = 0.0;
}

double SurfaceField::max_abs() const {
    double m = 0.0;
    for (int id = 0; id < grid_->node_count(); ++id)
        if (grid_->inside(id)) m = std::max(m, std::abs(values_[id]));
    return m;
}

BoundaryData BoundaryData::zero(const MaskedGrid& grid) {
    BoundaryData bc;
    for (int id = 0; id < grid.node_count(); ++id) {
        if (grid.tag(id) == BoundaryTag::DirichletClamped) {
            bc.f[id] = 0.0;
            bc.h[id] = 0.0;
        }
    }
    return bc;
}

BoundaryData BoundaryData::from_functions(const MaskedGrid& grid,
                                          const std::function<double(Point)>& fval,
                                          const std::function<double(Point, Point)>& hval) {
    BoundaryData bc;
    for (int j = 0; j < grid.nrows(); ++j) {
        for (int i = 0; i < grid.ncols(); ++i) {
            if (grid.tag(i, j) != BoundaryTag::DirichletClamped) continue;
            const int id = grid.node_id(i, j);
            const Point p = grid.node_pos(i, j);
            bc.f[id] = fval(p);
            const auto n = grid.outward_normal(i, j);
            bc.h[id] = n ? hval(p, Point{double(n->first), double(n->second)}) : 0.0;
        }
    }
    return bc;
}

double GaussianLoad::operator()(Point p) const {
    const double r2 = (p.x - center.x) * (p.x - center.x) + (p.y - center.y) * (p.y - center.y);
    return std::exp(-0.5 * r2 / (sigma * sigma)) / (sigma * std::sqrt(2.0 * M_PI));
}

// ---------------------------------------------------------------------------
// BiharmonicOperator assembly
// ---------------------------------------------------------------------------

BiharmonicOperator::BiharmonicOperator(const MaskedGrid& grid) : grid_(&grid) {
    build_dof_maps();
    assemble();
}

BiharmonicOperator assemble_operator(const MaskedGrid& grid) {
    return BiharmonicOperator(grid);
}

void BiharmonicOperator::build_dof_maps() {
    const MaskedGrid& g = *grid_;
    value_col_.assign(g.node_count(), -1);
    normal_col_.assign(g.node_count(), -1);
    for (int id = 0; id < g.node_count(); ++id) {
        if (!g.inside(id)) continue;
        value_col_[id] = n_values_++;
        value_nodes_.push_back(id);
        if (g.tag(id) == BoundaryTag::Interior) {
            interior_nodes_.push_back(id);
            ++interior_count_;
        }
    }
    for (int id = 0; id < g.node_count(); ++id) {
        const auto [i, j] = g.node_ij(id);
        if (g.is_boundary(id) && g.outward_normal(i, j)) {
            normal_col_[id] = n_values_ + n_normals_++;
            normal_nodes_.push_back(id);
        }
    }
    for (int id = 0; id < g.node_count(); ++id) {
        if (g.is_boundary(id)) boundary_value_cols_.push_back(value_col_[id]);
        if (normal_col_[id] >= 0) boundary_normal_cols_.push_back(normal_col_[id]);
    }
}

namespace {

/// Accumulates one matrix row; resolves ghost references by reflection
/// across tagged boundary nodes, which injects the normal dofs.
class RowBuilder {
public:
    RowBuilder(const BiharmonicOperator& op, std::vector<Eigen::Triplet<double>>& trips)
        : op_(op), g_(op.grid()), trips_(trips) {}

    void begin(int row) { row_ = row; }

    void add_value(int i, int j, double w) {
        if (!g_.in_range(i, j) || !g_.inside(i, j))
            throw NumericalError("stencil references inactive node " + node_str(i, j));
        trips_.emplace_back(row_, op_.value_col(g_.node_id(i, j)), w);
    }

    // Ghost across boundary node b along outward lattice direction d:
    // u_ghost = u(b - d) + 2 h g_b.
    void add_ghost(int bi, int bj, int di, int dj, double w) {
        const int id = g_.node_id(bi, bj);
        const auto n = g_.outward_normal(bi, bj);
        if (!g_.is_boundary(id) || !n || n->first != di || n->second != dj)
            throw NumericalError("ghost elimination needs a boundary node with outward normal at " +
                                 node_str(bi, bj));
        add_value(bi - di, bj - dj, w);
        trips_.emplace_back(row_, op_.normal_col(id), w * 2.0 * g_.spacing());
    }

    // 1-step reference from z: active node or ghost across z itself.
    void add_neighbor(int zi, int zj, int di, int dj, double w) {
        const int ti = zi + di, tj = zj + dj;
        if (g_.in_range(ti, tj) && g_.inside(ti, tj))
            add_value(ti, tj, w);
        else
            add_ghost(zi, zj, di, dj, w);
    }

    // 5-point laplacian of u at node z, scaled by w.
    void add_laplacian(int zi, int zj, double w) {
        const double ih2 = 1.0 / (g_.spacing() * g_.spacing());
        add_value(zi, zj, -4.0 * w * ih2);
        for (const auto& s : kSteps) add_neighbor(zi, zj, s[0], s[1], w * ih2);
    }

private:
    const BiharmonicOperator& op_;
    const MaskedGrid& g_;
    std::vector<Eigen::Triplet<double>>& trips_;
    int row_ = 0;
};

} // namespace

void BiharmonicOperator::assemble() {
    const MaskedGrid& g = *grid_;
    const double h = g.spacing();
    const double ih4 = 1.0 / (h * h * h * h);

    std::vector<Eigen::Triplet<double>> trips;
    RowBuilder rb(*this, trips);

    int row = 0;
    // 13-point biharmonic stencil rows, one per interior node.
    for (const int id : interior_nodes_) {
        const auto [i, j] = g.node_ij(id);
        rb.begin(row);
        rb.add_value(i, j, 20.0 * ih4);
        for (const auto& s : kSteps) rb.add_value(i + s[0], j + s[1], -8.0 * ih4);
        for (int di = -1; di <= 1; di += 2)
            for (int dj = -1; dj <= 1; dj += 2) rb.add_value(i + di, j + dj, 2.0 * ih4);
        for (const auto& s : kSteps) {
            const int ti = i + 2 * s[0], tj = j + 2 * s[1];
            if (g.in_range(ti, tj) && g.inside(ti, tj))
                rb.add_value(ti, tj, 1.0 * ih4);
            else
                rb.add_ghost(i + s[0], j + s[1], s[0], s[1], 1.0 * ih4);
        }
        ++row;
    }

    // Natural boundary closure: laplacian(u) = 0 and d_n(laplacian(u)) = 0,
    // the latter by a one-sided second-order difference along the inward
    // direction.
    std::vector<int> natural_nodes, natural_corners;
    for (int id = 0; id < g.node_count(); ++id) {
        if (g.tag(id) != BoundaryTag::NeumannNatural) continue;
        const auto [i, j] = g.node_ij(id);
        if (g.outward_normal(i, j))
            natural_nodes.push_back(id);
        else
            natural_corners.push_back(id);
    }
    for (const int id : natural_nodes) {
        const auto [i, j] = g.node_ij(id);
        const auto n = *g.outward_normal(i, j);
        const int ei = -n.first, ej = -n.second;

        rb.begin(row);
        rb.add_laplacian(i, j, 1.0);
        ++row;

        rb.begin(row);
        const double c = 1.0 / (2.0 * h);
        rb.add_laplacian(i, j, 3.0 * c);
        rb.add_laplacian(i + ei, j + ej, -4.0 * c);
        rb.add_laplacian(i + 2 * ei, j + 2 * ej, 1.0 * c);
        ++row;
    }
    // Natural corners: laplacian(u) = 0 with one-sided second derivatives
    // along both inward edge directions.
    for (const int id : natural_corners) {
        const auto [i, j] = g.node_ij(id);
        const int sx = (i == 0) ? 1 : -1;
        const int sy = (j == 0) ? 1 : -1;
        if ((i != 0 && i != g.ncols() - 1) || (j != 0 && j != g.nrows() - 1))
            throw NumericalError("natural boundary node without normal off the rectangle corner " +
                                 node_str(i, j));
        const double ih2 = 1.0 / (h * h);
        rb.begin(row);
        rb.add_value(i, j, 4.0 * ih2);
        rb.add_value(i + sx, j, -5.0 * ih2);
        rb.add_value(i + 2 * sx, j, 4.0 * ih2);
        rb.add_value(i + 3 * sx, j, -1.0 * ih2);
        rb.add_value(i, j + sy, -5.0 * ih2);
        rb.add_value(i, j + 2 * sy, 4.0 * ih2);
        rb.add_value(i, j + 3 * sy, -1.0 * ih2);
        ++row;
    }

    matrix_.resize(row, n_dof());
    matrix_.setFromTriplets(trips.begin(), trips.end());
    matrix_.makeCompressed();
}

Eigen::VectorXd BiharmonicOperator::pack_coefficients(
    const std::function<double(Point)>& value,
    const std::function<double(Point, Point)>& normal) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_dof());
    for (int col = 0; col < n_values_; ++col) c[col] = value(grid_->node_pos(value_nodes_[col]));
    for (int k = 0; k < n_normals_; ++k) {
        const int id = normal_nodes_[k];
        const auto [i, j] = grid_->node_ij(id);
        const auto n = *grid_->outward_normal(i, j);
        c[n_values_ + k] = normal(grid_->node_pos(id), Point{double(n.first), double(n.second)});
    }
    return c;
}

// ---------------------------------------------------------------------------
// Load vectors
// ---------------------------------------------------------------------------

Eigen::VectorXd assemble_gaussian_load(const MaskedGrid& grid,
                                       const std::vector<GaussianLoad>& loads,
                                       const std::vector<double>& weights) {
    if (!weights.empty() && weights.size() != loads.size())
        throw InputError("weight count does not match load count");
    for (std::size_t k = 0; k < loads.size(); ++k) {
        if (loads[k].sigma <= 0.0)
            throw InputError("load " + std::to_string(k) + " has non-positive sigma");
        MaskedGrid::CellRef cell;
        try {
            cell = grid.locate(loads[k].center);
        } catch (const std::exception&) {
            throw InputError("load " + std::to_string(k) + " center outside the domain");
        }
        const bool active = grid.inside(cell.i, cell.j) && grid.inside(cell.i + 1, cell.j) &&
                            grid.inside(cell.i, cell.j + 1) && grid.inside(cell.i + 1, cell.j + 1);
        if (!active) throw InputError("load " + std::to_string(k) + " center outside the domain");
    }

    std::vector<int> interior;
    for (int id = 0; id < grid.node_count(); ++id)
        if (grid.tag(id) == BoundaryTag::Interior) interior.push_back(id);

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(interior.size()));
    for (std::size_t r = 0; r < interior.size(); ++r) {
        const Point p = grid.node_pos(interior[r]);
        double v = 0.0;
        for (std::size_t k = 0; k < loads.size(); ++k)
            v += (weights.empty() ? 1.0 : weights[k]) * loads[k](p);
        rhs[static_cast<int>(r)] = v;
    }
    return rhs;
}

Eigen::VectorXd interior_rhs(const BiharmonicOperator& op,
                             const std::function<double(Point)>& q) {
    Eigen::VectorXd rhs(op.interior_row_count());
    for (int r = 0; r < op.interior_row_count(); ++r)
        rhs[r] = q(op.grid().node_pos(op.interior_row_node(r)));
    return rhs;
}

// ---------------------------------------------------------------------------
// Forward solver
// ---------------------------------------------------------------------------

ForwardSolver::ForwardSolver(const BiharmonicOperator& op) : op_(&op) {
    const MaskedGrid& g = op.grid();
    const int n = op.n_dof();
    col_kind_.assign(n, 0);
    for (int col = 0; col < op.n_value_dofs(); ++col) {
        const int id = op.value_col_node(col);
        if (g.tag(id) == BoundaryTag::DirichletClamped) col_kind_[col] = 1;
    }
    for (int col = op.n_value_dofs(); col < n; ++col) {
        const int id = op.normal_col_node(col);
        if (g.tag(id) == BoundaryTag::DirichletClamped) col_kind_[col] = 2;
    }
    std::vector<int> col_index(n, -1);
    for (int col = 0; col < n; ++col) {
        if (col_kind_[col] == 0) {
            col_index[col] = static_cast<int>(unknown_cols_.size());
            unknown_cols_.push_back(col);
        } else {
            col_index[col] = static_cast<int>(known_cols_.size());
            known_cols_.push_back(col);
        }
    }

    const int rows = op.pde_row_count();
    if (rows != static_cast<int>(unknown_cols_.size()))
        throw NumericalError("forward problem not well-posed: " + std::to_string(rows) +
                             " equations for " + std::to_string(unknown_cols_.size()) +
                             " unknowns");

    std::vector<Eigen::Triplet<double>> tu, tk;
    const auto& m = op.matrix();
    for (int r = 0; r < rows; ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, r); it; ++it) {
            if (col_kind_[it.col()] == 0)
                tu.emplace_back(r, col_index[it.col()], it.value());
            else
                tk.emplace_back(r, col_index[it.col()], it.value());
        }
    }
    m_unknown_.resize(rows, static_cast<int>(unknown_cols_.size()));
    m_unknown_.setFromTriplets(tu.begin(), tu.end());
    m_known_.resize(rows, static_cast<int>(known_cols_.size()));
    m_known_.setFromTriplets(tk.begin(), tk.end());

    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->compute(m_unknown_);
    if (lu_->info() != Eigen::Success)
        throw NumericalError("forward problem not well-posed");
}

Eigen::VectorXd ForwardSolver::solve_coefficients(const Eigen::VectorXd& rhs_interior,
                                                  const BoundaryData& bc) const {
    const BiharmonicOperator& op = *op_;
    const MaskedGrid& g = op.grid();
    if (rhs_interior.size() != op.interior_row_count())
        throw InputError("rhs length does not match interior row count");

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op.pde_row_count());
    rhs.head(op.interior_row_count()) = rhs_interior;

    Eigen::VectorXd xk(known_cols_.size());
    for (std::size_t k = 0; k < known_cols_.size(); ++k) {
        const int col = known_cols_[k];
        if (col_kind_[col] == 1) {
            const int id = op.value_col_node(col);
            const auto it = bc.f.find(id);
            if (it == bc.f.end())
                throw InputError("boundary data missing value for node " + std::to_string(id));
            xk[static_cast<int>(k)] = it->second;
        } else {
            const int id = op.normal_col_node(col);
            const auto it = bc.h.find(id);
            if (it == bc.h.end())
                throw InputError("boundary data missing normal derivative for node " +
                                 std::to_string(id));
            xk[static_cast<int>(k)] = it->second;
        }
    }

    const Eigen::VectorXd reduced = rhs - m_known_ * xk;
    const Eigen::VectorXd xu = lu_->solve(reduced);
    if (lu_->info() != Eigen::Success) throw NumericalError("forward solve failed");

    Eigen::VectorXd c = Eigen::VectorXd::Zero(op.n_dof());
    for (std::size_t k = 0; k < unknown_cols_.size(); ++k) c[unknown_cols_[k]] = xu[static_cast<int>(k)];
    for (std::size_t k = 0; k < known_cols_.size(); ++k) c[known_cols_[k]] = xk[static_cast<int>(k)];

    // interior residual check
    const Eigen::VectorXd res = op.matrix() * c - rhs;
    const double tol = 1e-8 * (1.0 + rhs_interior.lpNorm<Eigen::Infinity>());
    if (res.head(op.interior_row_count()).lpNorm<Eigen::Infinity>() > tol)
        throw NumericalError("forward solve residual exceeds tolerance");
    (void)g;
    return c;
}

SurfaceField ForwardSolver::solve(const Eigen::VectorXd& rhs_interior,
                                  const BoundaryData& bc) const {
    return field_from_coefficients(*op_, solve_coefficients(rhs_interior, bc));
}

SurfaceField solve_forward(const BiharmonicOperator& op, const Eigen::VectorXd& rhs_interior,
                           const BoundaryData& bc) {
    return ForwardSolver(op).solve(rhs_interior, bc);
}

SurfaceField field_from_coefficients(const BiharmonicOperator& op, const Eigen::VectorXd& c) {
    SurfaceField field(op.grid());
    for (int col = 0; col < op.n_value_dofs(); ++col)
        field.at(op.value_col_node(col)) = c[col];
    return field;
}

// ---------------------------------------------------------------------------
// Point evaluation
// ---------------------------------------------------------------------------

namespace {

struct BilinearStencil {
    int ids[4];
    double w[4];
};

BilinearStencil bilinear_stencil(const MaskedGrid& g, Point p) {
    const auto cell = g.locate(p);
    const int i = cell.i, j = cell.j;
    const bool active = g.inside(i, j) && g.inside(i + 1, j) && g.inside(i, j + 1) &&
                        g.inside(i + 1, j + 1);
    if (!active) throw InputError("point lies in the outside region");
    BilinearStencil s;
    s.ids[0] = g.node_id(i, j);
    s.ids[1] = g.node_id(i + 1, j);
    s.ids[2] = g.node_id(i, j + 1);
    s.ids[3] = g.node_id(i + 1, j + 1);
    s.w[0] = (1.0 - cell.u) * (1.0 - cell.v);
    s.w[1] = cell.u * (1.0 - cell.v);
    s.w[2] = (1.0 - cell.u) * cell.v;
    s.w[3] = cell.u * cell.v;
    return s;
}

} // namespace

double evaluate_at(const SurfaceField& field, Point p) {
    const auto s = bilinear_stencil(field.grid(), p);
    double v = 0.0;
    for (int k = 0; k < 4; ++k) v += s.w[k] * field.at(s.ids[k]);
    return v;
}

Eigen::SparseVector<double> evaluation_row(const BiharmonicOperator& op, Point p) {
    const auto s = bilinear_stencil(op.grid(), p);
    Eigen::SparseVector<double> row(op.n_dof());
    for (int k = 0; k < 4; ++k)
        if (s.w[k] != 0.0) row.coeffRef(op.value_col(s.ids[k])) += s.w[k];
    return row;
}

namespace {

// Which rectangle edges p lies on (within tol): bit 0 left, 1 right,
// 2 bottom, 3 top.
int rim_edges(const MaskedGrid& g, Point p, double tol) {
    int mask = 0;
    const double x1 = g.origin().x + (g.ncols() - 1) * g.spacing();
    const double y1 = g.origin().y + (g.nrows() - 1) * g.spacing();
    if (std::abs(p.x - g.origin().x) <= tol) mask |= 1;
    if (std::abs(p.x - x1) <= tol) mask |= 2;
    if (std::abs(p.y - g.origin().y) <= tol) mask |= 4;
    if (std::abs(p.y - y1) <= tol) mask |= 8;
    return mask;
}

} // namespace

Eigen::SparseVector<double> normal_derivative_row(const BiharmonicOperator& op, Point p,
                                                  std::optional<Point> normal) {
    const MaskedGrid& g = op.grid();
    const double h = g.spacing();
    const double tol = 1e-9 * h;
    const int edges = rim_edges(g, p, tol);
    const bool on_one_edge = edges == 1 || edges == 2 || edges == 4 || edges == 8;

    if (on_one_edge) {
        // Interpolate the boundary normal dofs along the edge; next to a
        // corner the two nearest dofs are extrapolated linearly.
        const bool vertical = (edges & 3) != 0; // left or right edge
        const int fixed_i = (edges == 1) ? 0 : (edges == 2) ? g.ncols() - 1 : -1;
        const int fixed_j = (edges == 4) ? 0 : (edges == 8) ? g.nrows() - 1 : -1;
        const int count = vertical ? g.nrows() : g.ncols();
        const double s = vertical ? (p.y - g.origin().y) / h : (p.x - g.origin().x) / h;

        const auto node_at = [&](int k) {
            return vertical ? g.node_id(fixed_i, k) : g.node_id(k, fixed_j);
        };
        std::vector<int> dof_ks;
        for (int k = 0; k < count; ++k)
            if (op.normal_col(node_at(k)) >= 0) dof_ks.push_back(k);
        if (dof_ks.size() < 2)
            throw InputError("no boundary normal dofs available near the requested point");
        // bracketing pair; near corners this extrapolates linearly
        std::size_t m = 0;
        while (m + 2 < dof_ks.size() && s > dof_ks[m + 1]) ++m;
        const int ka = dof_ks[m], kb = dof_ks[m + 1];
        const double t = (s - ka) / static_cast<double>(kb - ka);
        Eigen::SparseVector<double> row(op.n_dof());
        if (t != 1.0) row.coeffRef(op.normal_col(node_at(ka))) = 1.0 - t;
        if (t != 0.0) row.coeffRef(op.normal_col(node_at(kb))) = t;
        return row;
    }

    if (!normal)
        throw InputError("normal derivative off the tagged boundary requires a normal vector");
    const double len = norm(*normal);
    if (len <= 0.0) throw InputError("zero normal vector");
    const Point n{normal->x / len, normal->y / len};

    // One-sided second-order difference along -n (into the sampled side).
    const double d = h;
    Eigen::SparseVector<double> row(op.n_dof());
    const auto acc = [&](Point q, double w) {
        const auto e = evaluation_row(op, q);
        for (Eigen::SparseVector<double>::InnerIterator it(e); it; ++it)
            row.coeffRef(it.index()) += w * it.value();
    };
    acc(p, 3.0 / (2.0 * d));
    acc({p.x - d * n.x, p.y - d * n.y}, -4.0 / (2.0 * d));
    acc({p.x - 2.0 * d * n.x, p.y - 2.0 * d * n.y}, 1.0 / (2.0 * d));
    return row;
}

} // namespace bisurf
