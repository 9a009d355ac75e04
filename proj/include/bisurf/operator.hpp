#ifndef BISURF_OPERATOR_HPP
#define BISURF_OPERATOR_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "bisurf/errors.hpp"
#include "bisurf/masked_grid.hpp"

namespace bisurf {

/// Nodal values of a scalar surface over a masked grid. Values are defined
/// exactly on nodes not tagged Outside; outside entries hold NaN.
class SurfaceField {
public:
    explicit SurfaceField(const MaskedGrid& grid);

    const MaskedGrid& grid() const { return *grid_; }
    double& at(int i, int j) { return values_[grid_->node_id(i, j)]; }
    double at(int i, int j) const { return values_[grid_->node_id(i, j)]; }
    double& at(int id) { return values_[id]; }
    double at(int id) const { return values_[id]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double max_abs() const;

private:
    const MaskedGrid* grid_;
    std::vector<double> values_;
};

/// Clamped boundary data: values f and outward normal derivatives h, keyed
/// by node id over exactly the DirichletClamped nodes. h entries at corner
/// nodes are carried for completeness but never enter the discretization.
struct BoundaryData {
    std::map<int, double> f;
    std::map<int, double> h;

    static BoundaryData zero(const MaskedGrid& grid);
    static BoundaryData from_functions(const MaskedGrid& grid,
                                       const std::function<double(Point)>& fval,
                                       const std::function<double(Point, Point)>& hval);
};

/// One Gaussian load basis function. The response region is controlled by
/// sigma; the weight is box-constrained in the fitting stage.
struct GaussianLoad {
    Point center;
    double sigma = 1.0;
    double lower = -1.0;
    double upper = 1.0;

    double operator()(Point p) const;
};

/// Discrete biharmonic operator on a masked grid.
///
/// Rows discretize the PDE statements that do not involve prescribed data:
/// one 13-point stencil row per interior node, followed by the natural
/// boundary closure rows (laplacian and one-sided normal-derivative-of-
/// laplacian conditions per natural node, a one-sided laplacian row per
/// natural corner). Columns run over all degrees of freedom: a value dof per
/// active node, then an outward-normal-derivative dof per boundary node
/// with an unambiguous normal. Ghost points across tagged boundaries are
/// eliminated by reflection, which is where the normal dofs enter.
class BiharmonicOperator {
public:
    explicit BiharmonicOperator(const MaskedGrid& grid);

    const MaskedGrid& grid() const { return *grid_; }
    const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return matrix_; }

    int n_dof() const { return n_values_ + n_normals_; }
    int n_value_dofs() const { return n_values_; }
    int n_normal_dofs() const { return n_normals_; }
    int pde_row_count() const { return static_cast<int>(matrix_.rows()); }
    int interior_row_count() const { return interior_count_; }

    /// Column of the value dof of an active node, -1 otherwise.
    int value_col(int node_id) const { return value_col_[node_id]; }
    /// Column of the normal dof of a boundary node, -1 otherwise.
    int normal_col(int node_id) const { return normal_col_[node_id]; }
    /// Node owning a value dof column.
    int value_col_node(int col) const { return value_nodes_[col]; }
    /// Node owning a normal dof column (pass the absolute dof column).
    int normal_col_node(int col) const { return normal_nodes_[col - n_values_]; }

    /// Interior node of stencil row r (rows 0..interior_row_count-1).
    int interior_row_node(int row) const { return interior_nodes_[row]; }

    /// Columns of boundary value dofs / boundary normal dofs.
    const std::vector<int>& boundary_value_cols() const { return boundary_value_cols_; }
    const std::vector<int>& boundary_normal_cols() const { return boundary_normal_cols_; }

    /// Scatters a nodal field plus boundary normal data into a full dof
    /// vector (test and driver helper).
    Eigen::VectorXd pack_coefficients(const std::function<double(Point)>& value,
                                      const std::function<double(Point, Point)>& normal) const;

private:
    friend BiharmonicOperator assemble_operator(const MaskedGrid&);
    void build_dof_maps();
    void assemble();

    const MaskedGrid* grid_;
    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix_;
    std::vector<int> value_col_, normal_col_;
    std::vector<int> value_nodes_, normal_nodes_;
    std::vector<int> interior_nodes_;
    std::vector<int> boundary_value_cols_, boundary_normal_cols_;
    int n_values_ = 0, n_normals_ = 0, interior_count_ = 0;
};

BiharmonicOperator assemble_operator(const MaskedGrid& grid);

/// Collocation load vector over interior nodes: rhs_i = sum_j w_j q_j(x_i).
/// Every load center must lie in the active region; offending loads are
/// reported by index.
Eigen::VectorXd assemble_gaussian_load(const MaskedGrid& grid,
                                       const std::vector<GaussianLoad>& loads,
                                       const std::vector<double>& weights = {});

/// Interior rhs vector from a pointwise load function.
Eigen::VectorXd interior_rhs(const BiharmonicOperator& op,
                             const std::function<double(Point)>& q);

/// Direct factorization of the forward problem; reusable across right-hand
/// sides and boundary data. Throws NumericalError when the reduced system is
/// singular (e.g. all-natural boundary).
class ForwardSolver {
public:
    explicit ForwardSolver(const BiharmonicOperator& op);

    /// Full dof vector (values + normal dofs) solving the forward problem.
    Eigen::VectorXd solve_coefficients(const Eigen::VectorXd& rhs_interior,
                                       const BoundaryData& bc) const;
    SurfaceField solve(const Eigen::VectorXd& rhs_interior, const BoundaryData& bc) const;

    const BiharmonicOperator& op() const { return *op_; }

private:
    const BiharmonicOperator* op_;
    std::vector<int> unknown_cols_, known_cols_;
    std::vector<int> col_kind_; // 0 unknown, 1 known(dirichlet value), 2 known(dirichlet normal)
    Eigen::SparseMatrix<double> m_unknown_, m_known_;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

SurfaceField solve_forward(const BiharmonicOperator& op, const Eigen::VectorXd& rhs_interior,
                           const BoundaryData& bc);

/// Extracts the nodal values of a full dof vector into a field.
SurfaceField field_from_coefficients(const BiharmonicOperator& op, const Eigen::VectorXd& c);

/// Bilinear interpolation from the four surrounding nodes; exact at nodes.
double evaluate_at(const SurfaceField& field, Point p);

/// Sparse row over the operator dofs whose product with a coefficient
/// vector equals evaluate_at at p.
Eigen::SparseVector<double> evaluation_row(const BiharmonicOperator& op, Point p);

/// Sparse row estimating the outward normal derivative at p. On tagged
/// rectangle edges the row interpolates the boundary normal dofs (the
/// discrete representation of d_n u there); elsewhere a supplied unit
/// normal is required and a one-sided second-order difference of bilinear
/// evaluations is used.
Eigen::SparseVector<double> normal_derivative_row(const BiharmonicOperator& op, Point p,
                                                  std::optional<Point> normal = std::nullopt);

} // namespace bisurf

#endif
