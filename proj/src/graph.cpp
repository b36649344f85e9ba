#include "nsgapinn/graph.hpp"

#include <cmath>

namespace nsgapinn::ad {

namespace {
using RowMajorMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}

Program::NodeId Program::push(Node n) {
    n.adjoint.setZero(n.value.rows(), n.value.cols());
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

const Program::Node& Program::check_id(NodeId id) const {
    if (id < 0 || id >= static_cast<NodeId>(nodes_.size()))
        throw Error(name_ + ": node id " + std::to_string(id) + " out of range");
    return nodes_[static_cast<std::size_t>(id)];
}

void Program::require_same_shape(NodeId a, NodeId b, const char* what) const {
    const Node& na = check_id(a);
    const Node& nb = check_id(b);
    if (node_rows(na) != node_rows(nb))
        throw DimensionError(std::string(what) + " rows", node_rows(na), node_rows(nb));
    if (node_cols(na) != node_cols(nb))
        throw DimensionError(std::string(what) + " cols", node_cols(na), node_cols(nb));
}

Program::NodeId Program::constant(Eigen::MatrixXd value) {
    Node n{Op::Const};
    n.value = std::move(value);
    return push(std::move(n));
}

Program::NodeId Program::param(int rows, int cols, std::size_t offset, bool row_major) {
    if (rows <= 0 || cols <= 0)
        throw DimensionError("param shape", 1, rows <= 0 ? rows : cols);
    Node n{Op::Param};
    n.offset = offset;
    n.row_major = row_major;
    n.value.setZero(rows, cols);
    return push(std::move(n));
}

Program::NodeId Program::matmul(NodeId a, NodeId b) {
    const Node& na = check_id(a);
    const Node& nb = check_id(b);
    if (node_cols(na) != node_rows(nb))
        throw DimensionError("matmul inner dimension", node_cols(na), node_rows(nb));
    Node n{Op::MatMul, a, b};
    n.value.setZero(na.value.rows(), nb.value.cols());
    return push(std::move(n));
}

Program::NodeId Program::add_bias(NodeId a, NodeId b) {
    const Node& na = check_id(a);
    const Node& nb = check_id(b);
    if (node_rows(na) != node_rows(nb))
        throw DimensionError("add_bias rows", node_rows(na), node_rows(nb));
    if (node_cols(nb) != 1) throw DimensionError("add_bias bias cols", 1, node_cols(nb));
    Node n{Op::AddBias, a, b};
    n.value.setZero(na.value.rows(), na.value.cols());
    return push(std::move(n));
}

Program::NodeId Program::add(NodeId a, NodeId b) {
    require_same_shape(a, b, "add");
    Node n{Op::Add, a, b};
    n.value.setZero(rows(a), cols(a));
    return push(std::move(n));
}

Program::NodeId Program::sub(NodeId a, NodeId b) {
    require_same_shape(a, b, "sub");
    Node n{Op::Sub, a, b};
    n.value.setZero(rows(a), cols(a));
    return push(std::move(n));
}

Program::NodeId Program::mul(NodeId a, NodeId b) {
    require_same_shape(a, b, "mul");
    Node n{Op::Mul, a, b};
    n.value.setZero(rows(a), cols(a));
    return push(std::move(n));
}

Program::NodeId Program::mul_scalar(NodeId a, NodeId s) {
    const Node& ns = check_id(s);
    if (node_rows(ns) != 1 || node_cols(ns) != 1)
        throw DimensionError("mul_scalar scalar size", 1, node_rows(ns) * node_cols(ns));
    Node n{Op::MulScalar, a, s};
    n.value.setZero(rows(a), cols(a));
    return push(std::move(n));
}

Program::NodeId Program::scale(NodeId a, double c) {
    Node n{Op::Scale, a};
    n.factor = c;
    n.value.setZero(rows(a), cols(a));
    return push(std::move(n));
}

Program::NodeId Program::tanh(NodeId a) {
    Node n{Op::Tanh, a};
    n.value.setZero(rows(a), cols(a));
    return push(std::move(n));
}

Program::NodeId Program::sin(NodeId a) {
    Node n{Op::Sin, a};
    n.value.setZero(rows(a), cols(a));
    return push(std::move(n));
}

Program::NodeId Program::square(NodeId a) {
    Node n{Op::Square, a};
    n.value.setZero(rows(a), cols(a));
    return push(std::move(n));
}

Program::NodeId Program::one_minus_square(NodeId a) {
    Node n{Op::OneMinusSquare, a};
    n.value.setZero(rows(a), cols(a));
    return push(std::move(n));
}

Program::NodeId Program::row(NodeId a, int i) {
    const Node& na = check_id(a);
    if (i < 0 || i >= node_rows(na))
        throw DimensionError("row index", node_rows(na), i);
    Node n{Op::Row, a};
    n.index = i;
    n.value.setZero(1, na.value.cols());
    return push(std::move(n));
}

Program::NodeId Program::mean_all(NodeId a) {
    check_id(a);
    Node n{Op::MeanAll, a};
    n.value.setZero(1, 1);
    return push(std::move(n));
}

void Program::finish(NodeId output, std::size_t param_length) {
    const Node& n = check_id(output);
    if (node_rows(n) != 1 || node_cols(n) != 1)
        throw DimensionError("program output size", 1, node_rows(n) * node_cols(n));
    for (const Node& node : nodes_) {
        if (node.op != Op::Param) continue;
        const std::size_t need =
            node.offset + static_cast<std::size_t>(node.value.size());
        if (need > param_length)
            throw DimensionError("param block end", static_cast<long>(param_length),
                                 static_cast<long>(need));
    }
    output_ = output;
    param_length_ = param_length;
}

double Program::forward(std::span<const double> params) {
    if (output_ < 0) throw Error(name_ + ": program not finished");
    if (params.size() != param_length_)
        throw DimensionError("parameter vector length", static_cast<long>(param_length_),
                             static_cast<long>(params.size()));
    for (Node& n : nodes_) {
        const auto& va = n.a >= 0 ? nodes_[static_cast<std::size_t>(n.a)].value
                                  : n.value;
        const auto& vb = n.b >= 0 ? nodes_[static_cast<std::size_t>(n.b)].value
                                  : n.value;
        switch (n.op) {
            case Op::Const:
                break;
            case Op::Param: {
                const double* src = params.data() + n.offset;
                if (n.row_major)
                    n.value = Eigen::Map<const RowMajorMat>(src, n.value.rows(),
                                                            n.value.cols());
                else
                    n.value = Eigen::Map<const Eigen::MatrixXd>(src, n.value.rows(),
                                                                n.value.cols());
                break;
            }
            case Op::MatMul: n.value.noalias() = va * vb; break;
            case Op::AddBias: n.value = va.colwise() + vb.col(0); break;
            case Op::Add: n.value = va + vb; break;
            case Op::Sub: n.value = va - vb; break;
            case Op::Mul: n.value = va.cwiseProduct(vb); break;
            case Op::MulScalar: n.value = vb(0, 0) * va; break;
            case Op::Scale: n.value = n.factor * va; break;
            case Op::Tanh: n.value = va.array().tanh(); break;
            case Op::Sin: n.value = va.array().sin(); break;
            case Op::Square: n.value = va.array().square(); break;
            case Op::OneMinusSquare: n.value = 1.0 - va.array().square(); break;
            case Op::Row: n.value = va.row(n.index); break;
            case Op::MeanAll: n.value(0, 0) = va.mean(); break;
        }
    }
    const double out = nodes_[static_cast<std::size_t>(output_)].value(0, 0);
    if (!std::isfinite(out)) throw NonFiniteError(name_, out);
    return out;
}

void Program::backward(std::span<double> grad) {
    if (output_ < 0) throw Error(name_ + ": program not finished");
    if (grad.size() != param_length_)
        throw DimensionError("gradient vector length", static_cast<long>(param_length_),
                             static_cast<long>(grad.size()));
    for (Node& n : nodes_) n.adjoint.setZero();
    nodes_[static_cast<std::size_t>(output_)].adjoint(0, 0) = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        Node& n = *it;
        const Eigen::MatrixXd& g = n.adjoint;
        Eigen::MatrixXd* ga = n.a >= 0 ? &nodes_[static_cast<std::size_t>(n.a)].adjoint
                                       : nullptr;
        Eigen::MatrixXd* gb = n.b >= 0 ? &nodes_[static_cast<std::size_t>(n.b)].adjoint
                                       : nullptr;
        const auto& va = n.a >= 0 ? nodes_[static_cast<std::size_t>(n.a)].value
                                  : n.value;
        const auto& vb = n.b >= 0 ? nodes_[static_cast<std::size_t>(n.b)].value
                                  : n.value;
        switch (n.op) {
            case Op::Const:
                break;
            case Op::Param: {
                double* dst = grad.data() + n.offset;
                if (n.row_major)
                    Eigen::Map<RowMajorMat>(dst, n.value.rows(), n.value.cols()) +=
                        n.adjoint;
                else
                    Eigen::Map<Eigen::MatrixXd>(dst, n.value.rows(), n.value.cols()) +=
                        n.adjoint;
                break;
            }
            case Op::MatMul:
                ga->noalias() += g * vb.transpose();
                gb->noalias() += va.transpose() * g;
                break;
            case Op::AddBias:
                *ga += g;
                gb->col(0) += g.rowwise().sum();
                break;
            case Op::Add:
                *ga += g;
                *gb += g;
                break;
            case Op::Sub:
                *ga += g;
                *gb -= g;
                break;
            case Op::Mul:
                ga->array() += g.array() * vb.array();
                gb->array() += g.array() * va.array();
                break;
            case Op::MulScalar:
                *ga += vb(0, 0) * g;
                (*gb)(0, 0) += (g.array() * va.array()).sum();
                break;
            case Op::Scale: *ga += n.factor * g; break;
            case Op::Tanh:
                ga->array() += g.array() * (1.0 - n.value.array().square());
                break;
            case Op::Sin: ga->array() += g.array() * va.array().cos(); break;
            case Op::Square: ga->array() += 2.0 * g.array() * va.array(); break;
            case Op::OneMinusSquare:
                ga->array() -= 2.0 * g.array() * va.array();
                break;
            case Op::Row: ga->row(n.index) += g; break;
            case Op::MeanAll:
                ga->array() += g(0, 0) / static_cast<double>(va.size());
                break;
        }
    }
}

double Program::value_and_grad(std::span<const double> params, std::span<double> grad) {
    const double v = forward(params);
    backward(grad);
    return v;
}

double loss_value(Program& program, std::span<const double> params) {
    return program.forward(params);
}

double grad_params(Program& program, std::span<const double> params,
                   std::span<double> grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    return program.value_and_grad(params, grad);
}

NetTape record_net(Program& p, const MlpConfig& cfg,
                   const Eigen::MatrixXd& batch_inputs) {
    if (batch_inputs.rows() != cfg.input_dim)
        throw DimensionError("batch input rows", cfg.input_dim,
                             static_cast<long>(batch_inputs.rows()));
    NetTape net;
    net.cfg = cfg;
    net.batch = static_cast<int>(batch_inputs.cols());
    net.input = p.constant(batch_inputs);

    const std::vector<int> dims = cfg.layer_dims();
    Program::NodeId cur = net.input;
    std::size_t off = 0;
    for (std::size_t layer = 0; layer + 1 < dims.size(); ++layer) {
        const int fan_in = dims[layer];
        const int fan_out = dims[layer + 1];
        const Program::NodeId w = p.param(fan_out, fan_in, off, true);
        const Program::NodeId b =
            p.param(fan_out, 1, off + static_cast<std::size_t>(fan_out) * fan_in, true);
        off += static_cast<std::size_t>(fan_in + 1) * fan_out;
        net.weights.push_back(w);
        cur = p.add_bias(p.matmul(w, cur), b);
        if (layer + 2 < dims.size()) {
            cur = p.tanh(cur);
            net.hidden.push_back(cur);
            net.dtanh.push_back(-1);
        }
    }
    net.output = cur;
    return net;
}

namespace {

Program::NodeId ensure_dtanh(Program& p, NetTape& net, std::size_t layer) {
    if (net.dtanh[layer] < 0)
        net.dtanh[layer] = p.one_minus_square(net.hidden[layer]);
    return net.dtanh[layer];
}

Eigen::MatrixXd seed_matrix(const NetTape& net, int coord) {
    if (coord < 0 || coord >= net.cfg.input_dim)
        throw DimensionError("jet seed coordinate", net.cfg.input_dim, coord);
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(net.cfg.input_dim, net.batch);
    e.row(coord).setOnes();
    return e;
}

}  // namespace

Program::NodeId record_jet1(Program& p, NetTape& net, int coord) {
    Program::NodeId d = p.constant(seed_matrix(net, coord));
    for (std::size_t layer = 0; layer < net.hidden.size(); ++layer) {
        const Program::NodeId dz = p.matmul(net.weights[layer], d);
        d = p.mul(ensure_dtanh(p, net, layer), dz);
    }
    return p.matmul(net.weights.back(), d);
}

std::pair<Program::NodeId, Program::NodeId> record_jet2(Program& p, NetTape& net,
                                                        int coord) {
    Program::NodeId d1 = p.constant(seed_matrix(net, coord));
    Program::NodeId d2 =
        p.constant(Eigen::MatrixXd::Zero(net.cfg.input_dim, net.batch));
    for (std::size_t layer = 0; layer < net.hidden.size(); ++layer) {
        const Program::NodeId d1z = p.matmul(net.weights[layer], d1);
        const Program::NodeId d2z = p.matmul(net.weights[layer], d2);
        const Program::NodeId s = ensure_dtanh(p, net, layer);
        // a = tanh(z): da = s*dz, d2a = s*d2z - 2*a*s*(dz)^2
        const Program::NodeId curved =
            p.scale(p.mul(p.mul(net.hidden[layer], s), p.square(d1z)), -2.0);
        d2 = p.add(p.mul(s, d2z), curved);
        d1 = p.mul(s, d1z);
    }
    return {p.matmul(net.weights.back(), d1), p.matmul(net.weights.back(), d2)};
}

}  // namespace nsgapinn::ad
