#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nsgapinn/common.hpp"
#include "nsgapinn/mlp.hpp"

namespace nsgapinn::ad {

/// A recorded batched computation ending in one scalar. Built once per
/// (loss term, network shape, sample set); evaluated many times by loading
/// a flat parameter vector, running the node list forward, then sweeping
/// it backward to accumulate exact parameter gradients.
///
/// Input derivatives needed by residual losses are recorded as additional
/// forward-mode channels on the same node list (see record_jet1/record_jet2),
/// so the backward sweep differentiates through them too.
class Program {
public:
    using NodeId = int;

    explicit Program(std::string name = "loss") : name_(std::move(name)) {}

    const std::string& name() const { return name_; }

    // Graph construction. Shapes are checked here, not at evaluation time.
    NodeId constant(Eigen::MatrixXd value);
    /// Trainable block read from the flat parameter vector at byte.. element
    /// offset. row_major matches the network weight layout; biases and
    /// scalars can use either.
    NodeId param(int rows, int cols, std::size_t offset, bool row_major = true);
    NodeId matmul(NodeId a, NodeId b);
    /// a (m x n) plus column vector b (m x 1) broadcast over columns.
    NodeId add_bias(NodeId a, NodeId b);
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    /// Elementwise product of same-shaped operands.
    NodeId mul(NodeId a, NodeId b);
    /// Matrix a scaled by the 1x1 node s.
    NodeId mul_scalar(NodeId a, NodeId s);
    NodeId scale(NodeId a, double c);
    NodeId tanh(NodeId a);
    NodeId sin(NodeId a);
    NodeId square(NodeId a);
    /// 1 - a^2, the tanh derivative given the tanh output.
    NodeId one_minus_square(NodeId a);
    NodeId row(NodeId a, int i);
    NodeId mean_all(NodeId a);

    /// Declare the final scalar (must be 1x1) and the expected flat
    /// parameter length.
    void finish(NodeId output, std::size_t param_length);

    int rows(NodeId id) const { return node_rows(check_id(id)); }
    int cols(NodeId id) const { return node_cols(check_id(id)); }
    std::size_t size() const { return nodes_.size(); }

    /// Load params, run the node list; returns the scalar. Throws
    /// NonFiniteError (named after the program) if the result is not finite.
    double forward(std::span<const double> params);
    /// Reverse sweep after forward(); adds d(scalar)/d(params) into grad.
    void backward(std::span<double> grad);
    double value_and_grad(std::span<const double> params, std::span<double> grad);

private:
    enum class Op {
        Const, Param, MatMul, AddBias, Add, Sub, Mul, MulScalar,
        Scale, Tanh, Sin, Square, OneMinusSquare, Row, MeanAll,
    };

    struct Node {
        explicit Node(Op o, NodeId na = -1, NodeId nb = -1) : op(o), a(na), b(nb) {}
        Op op;
        NodeId a = -1;
        NodeId b = -1;
        int index = 0;           // Row
        double factor = 1.0;     // Scale
        std::size_t offset = 0;  // Param
        bool row_major = true;   // Param
        Eigen::MatrixXd value;
        Eigen::MatrixXd adjoint;
    };

    NodeId push(Node n);
    const Node& check_id(NodeId id) const;
    static int node_rows(const Node& n) { return static_cast<int>(n.value.rows()); }
    static int node_cols(const Node& n) { return static_cast<int>(n.value.cols()); }
    void require_same_shape(NodeId a, NodeId b, const char* what) const;

    std::string name_;
    std::vector<Node> nodes_;
    NodeId output_ = -1;
    std::size_t param_length_ = 0;
};

/// forward(): the scalar value only.
double loss_value(Program& program, std::span<const double> params);

/// Exact gradient of the recorded scalar with respect to the full flat
/// parameter vector. grad is overwritten; returns the scalar value.
double grad_params(Program& program, std::span<const double> params,
                   std::span<double> grad);

/// Node handles produced while recording a network forward pass on a batch
/// (inputs as columns). Kept so derivative channels can reuse the weight
/// nodes and activation values.
struct NetTape {
    MlpConfig cfg;
    int batch = 0;
    Program::NodeId input = -1;
    Program::NodeId output = -1;
    std::vector<Program::NodeId> weights;  // per layer
    std::vector<Program::NodeId> hidden;   // tanh outputs per hidden layer
    std::vector<Program::NodeId> dtanh;    // 1 - hidden^2; -1 until needed
};

/// Record net(batch_inputs) on the program. batch_inputs is input_dim x n.
/// Parameter nodes use the flat layout of MlpConfig.
NetTape record_net(Program& p, const MlpConfig& cfg,
                   const Eigen::MatrixXd& batch_inputs);

/// First derivative of every output w.r.t. input coordinate coord,
/// recorded as a forward-mode channel; returns the output_dim x n node.
Program::NodeId record_jet1(Program& p, NetTape& net, int coord);

/// First and second derivative channels w.r.t. coordinate coord.
std::pair<Program::NodeId, Program::NodeId> record_jet2(Program& p, NetTape& net,
                                                        int coord);

}  // namespace nsgapinn::ad
