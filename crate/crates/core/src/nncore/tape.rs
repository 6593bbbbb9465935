//! Reverse-mode differentiation over dense matrices.
//!
//! A [`Tape`] records every operation as a [`DiffNode`] in creation order.
//! Creation order is a topological order of the computation DAG, so
//! [`Tape::backward`] walks the node list once from the root down to the
//! leaves, summing gradient contributions into each parent. Shared
//! subexpressions therefore accumulate gradients from every consumer.

use crate::error::{Error, Result};

use super::matrix::Matrix;

/// Handle to a node recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add { a: Var, b: Var, broadcast: bool },
    Sub(Var, Var),
    Mul(Var, Var),
    Concat(Var, Var),
    Sigmoid(Var),
    Tanh(Var),
    Relu(Var),
    MeanRows(Var),
    Scale(Var, f64),
    Transpose(Var),
    Reshape(Var),
    Sum(Var),
    Mse { truth: Var, pred: Var },
}

impl Op {
    fn parents(&self) -> Vec<Var> {
        match *self {
            Op::Leaf => vec![],
            Op::MatMul(a, b)
            | Op::Add { a, b, .. }
            | Op::Sub(a, b)
            | Op::Mul(a, b)
            | Op::Concat(a, b) => vec![a, b],
            Op::Mse { truth, pred } => vec![truth, pred],
            Op::Sigmoid(a)
            | Op::Tanh(a)
            | Op::Relu(a)
            | Op::MeanRows(a)
            | Op::Scale(a, _)
            | Op::Transpose(a)
            | Op::Reshape(a)
            | Op::Sum(a) => vec![a],
        }
    }
}

/// One recorded value: its data, its accumulated gradient and how it was made.
#[derive(Debug, Clone)]
pub struct DiffNode {
    value: Matrix,
    grad: Option<Matrix>,
    requires_grad: bool,
    op: Op,
}

impl DiffNode {
    pub fn value(&self) -> &Matrix {
        &self.value
    }

    pub fn grad(&self) -> Option<&Matrix> {
        self.grad.as_ref()
    }

    pub fn requires_grad(&self) -> bool {
        self.requires_grad
    }

    pub fn shape(&self) -> [usize; 2] {
        self.value.shape()
    }
}

#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<DiffNode>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Trainable input: gradients flow into it.
    pub fn leaf(&mut self, value: Matrix) -> Var {
        self.push(value, true, Op::Leaf)
    }

    /// Fixed input: no gradient is tracked.
    pub fn constant(&mut self, value: Matrix) -> Var {
        self.push(value, false, Op::Leaf)
    }

    pub fn node(&self, v: Var) -> &DiffNode {
        &self.nodes[v.0]
    }

    pub fn value(&self, v: Var) -> &Matrix {
        &self.nodes[v.0].value
    }

    pub fn grad(&self, v: Var) -> Option<&Matrix> {
        self.nodes[v.0].grad.as_ref()
    }

    /// Gradient of `v`, or zeros when nothing reached it.
    pub fn grad_or_zeros(&self, v: Var) -> Matrix {
        let node = &self.nodes[v.0];
        node.grad
            .clone()
            .unwrap_or_else(|| Matrix::zeros(node.value.rows(), node.value.cols()))
    }

    pub fn scalar(&self, v: Var) -> f64 {
        self.nodes[v.0].value.as_slice()[0]
    }

    pub fn zero_grads(&mut self) {
        for n in &mut self.nodes {
            n.grad = None;
        }
    }

    fn push(&mut self, value: Matrix, requires_grad: bool, op: Op) -> Var {
        self.nodes.push(DiffNode {
            value,
            grad: None,
            requires_grad,
            op,
        });
        Var(self.nodes.len() - 1)
    }

    fn push_op(&mut self, name: &'static str, value: Matrix, op: Op) -> Result<Var> {
        if !value.is_finite() {
            return Err(Error::Numeric(format!(
                "{name} produced a non-finite value"
            )));
        }
        let requires_grad = op.parents().iter().any(|p| self.nodes[p.0].requires_grad);
        Ok(self.push(value, requires_grad, op))
    }

    fn shape_of(&self, v: Var) -> [usize; 2] {
        self.nodes[v.0].value.shape()
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).matmul(self.value(b))?;
        self.push_op("matmul", value, Op::MatMul(a, b))
    }

    /// Elementwise `a + b`; `b` may also be a single row broadcast over the rows of `a`.
    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (sa, sb) = (self.shape_of(a), self.shape_of(b));
        let broadcast = if sa == sb {
            false
        } else if sb[0] == 1 && sb[1] == sa[1] {
            true
        } else {
            return Err(Error::shape("add", sa, sb));
        };
        let mut value = self.value(a).clone();
        if broadcast {
            let row = self.value(b).as_slice().to_vec();
            for i in 0..sa[0] {
                for (x, y) in value.row_mut(i).iter_mut().zip(&row) {
                    *x += y;
                }
            }
        } else {
            value.add_assign(self.value(b))?;
        }
        self.push_op("add", value, Op::Add { a, b, broadcast })
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        let (sa, sb) = (self.shape_of(a), self.shape_of(b));
        if sa != sb {
            return Err(Error::shape("sub", sa, sb));
        }
        let data = zip_map(self.value(a), self.value(b), |x, y| x - y);
        self.push_op("sub", data, Op::Sub(a, b))
    }

    /// Elementwise (Hadamard) product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (sa, sb) = (self.shape_of(a), self.shape_of(b));
        if sa != sb {
            return Err(Error::shape("mul", sa, sb));
        }
        let data = zip_map(self.value(a), self.value(b), |x, y| x * y);
        self.push_op("mul", data, Op::Mul(a, b))
    }

    /// Concatenation along the last axis.
    pub fn concat(&mut self, a: Var, b: Var) -> Result<Var> {
        let (sa, sb) = (self.shape_of(a), self.shape_of(b));
        if sa[0] != sb[0] {
            return Err(Error::shape("concat", sa, sb));
        }
        let mut out = Matrix::zeros(sa[0], sa[1] + sb[1]);
        for i in 0..sa[0] {
            let row = out.row_mut(i);
            row[..sa[1]].copy_from_slice(self.nodes[a.0].value.row(i));
            row[sa[1]..].copy_from_slice(self.nodes[b.0].value.row(i));
        }
        self.push_op("concat", out, Op::Concat(a, b))
    }

    pub fn sigmoid(&mut self, a: Var) -> Result<Var> {
        let value = self.value(a).map(sigmoid);
        self.push_op("sigmoid", value, Op::Sigmoid(a))
    }

    pub fn tanh(&mut self, a: Var) -> Result<Var> {
        let value = self.value(a).map(f64::tanh);
        self.push_op("tanh", value, Op::Tanh(a))
    }

    pub fn relu(&mut self, a: Var) -> Result<Var> {
        let value = self.value(a).map(|x| x.max(0.0));
        self.push_op("relu", value, Op::Relu(a))
    }

    /// Column-wise mean over rows, giving a `1 × cols` row.
    ///
    /// Each column is summed in ascending value order, so any row
    /// permutation of the input yields a bit-identical result.
    pub fn mean_rows(&mut self, a: Var) -> Result<Var> {
        let [rows, cols] = self.shape_of(a);
        if rows == 0 {
            return Err(Error::Input("mean_rows of an empty matrix".into()));
        }
        let src = self.value(a);
        let mut column = Vec::with_capacity(rows);
        let mut out = Matrix::zeros(1, cols);
        for j in 0..cols {
            column.clear();
            column.extend((0..rows).map(|i| src[(i, j)]));
            column.sort_by(f64::total_cmp);
            out[(0, j)] = column.iter().sum::<f64>() / rows as f64;
        }
        self.push_op("mean_rows", out, Op::MeanRows(a))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Result<Var> {
        let value = self.value(a).map(|x| c * x);
        self.push_op("scale", value, Op::Scale(a, c))
    }

    pub fn transpose(&mut self, a: Var) -> Result<Var> {
        let value = self.value(a).transpose();
        self.push_op("transpose", value, Op::Transpose(a))
    }

    pub fn reshape(&mut self, a: Var, rows: usize, cols: usize) -> Result<Var> {
        let value = self.value(a).reshaped(rows, cols)?;
        self.push_op("reshape", value, Op::Reshape(a))
    }

    /// Sum of all elements as a `1 × 1` scalar.
    pub fn sum(&mut self, a: Var) -> Result<Var> {
        let s: f64 = self.value(a).as_slice().iter().sum();
        self.push_op("sum", Matrix::filled(1, 1, s), Op::Sum(a))
    }

    /// Mean squared error over every scalar element.
    pub fn mse(&mut self, truth: Var, pred: Var) -> Result<Var> {
        let (st, sp) = (self.shape_of(truth), self.shape_of(pred));
        if st != sp {
            return Err(Error::shape("mse", st, sp));
        }
        let n = self.value(pred).len();
        if n == 0 {
            return Err(Error::Input("mse over zero elements".into()));
        }
        let s: f64 = self
            .value(truth)
            .as_slice()
            .iter()
            .zip(self.value(pred).as_slice())
            .map(|(y, p)| (y - p) * (y - p))
            .sum();
        self.push_op(
            "mse",
            Matrix::filled(1, 1, s / n as f64),
            Op::Mse { truth, pred },
        )
    }

    /// Propagate gradients from `root`, seeding it with ones.
    ///
    /// Gradients accumulate on top of whatever is already stored; call
    /// [`Tape::zero_grads`] between independent backward passes.
    pub fn backward(&mut self, root: Var) -> Result<()> {
        let [r, c] = self.shape_of(root);
        accumulate(&mut self.nodes[root.0].grad, Matrix::filled(r, c, 1.0))?;
        for idx in (0..=root.0).rev() {
            if !self.nodes[idx].requires_grad {
                continue;
            }
            let Some(grad) = self.nodes[idx].grad.take() else {
                continue;
            };
            let op = self.nodes[idx].op.clone();
            let contributions = self.local_gradients(idx, &op, &grad)?;
            self.nodes[idx].grad = Some(grad);
            for (parent, g) in contributions {
                if self.nodes[parent.0].requires_grad {
                    accumulate(&mut self.nodes[parent.0].grad, g)?;
                }
            }
        }
        Ok(())
    }

    fn wants(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    fn local_gradients(&self, idx: usize, op: &Op, g: &Matrix) -> Result<Vec<(Var, Matrix)>> {
        let out = &self.nodes[idx].value;
        let mut res = Vec::with_capacity(2);
        match *op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                if self.wants(a) {
                    res.push((a, g.matmul_nt(self.value(b))?));
                }
                if self.wants(b) {
                    res.push((b, self.value(a).matmul_tn(g)?));
                }
            }
            Op::Add { a, b, broadcast } => {
                if self.wants(a) {
                    res.push((a, g.clone()));
                }
                if self.wants(b) {
                    if broadcast {
                        res.push((b, column_sums(g)));
                    } else {
                        res.push((b, g.clone()));
                    }
                }
            }
            Op::Sub(a, b) => {
                if self.wants(a) {
                    res.push((a, g.clone()));
                }
                if self.wants(b) {
                    res.push((b, g.map(|x| -x)));
                }
            }
            Op::Mul(a, b) => {
                if self.wants(a) {
                    res.push((a, zip_map(g, self.value(b), |x, y| x * y)));
                }
                if self.wants(b) {
                    res.push((b, zip_map(g, self.value(a), |x, y| x * y)));
                }
            }
            Op::Concat(a, b) => {
                let ca = self.value(a).cols();
                let cb = self.value(b).cols();
                let rows = g.rows();
                if self.wants(a) {
                    let mut ga = Matrix::zeros(rows, ca);
                    for i in 0..rows {
                        ga.row_mut(i).copy_from_slice(&g.row(i)[..ca]);
                    }
                    res.push((a, ga));
                }
                if self.wants(b) {
                    let mut gb = Matrix::zeros(rows, cb);
                    for i in 0..rows {
                        gb.row_mut(i).copy_from_slice(&g.row(i)[ca..]);
                    }
                    res.push((b, gb));
                }
            }
            Op::Sigmoid(a) => {
                res.push((a, zip_map(g, out, |gi, y| gi * y * (1.0 - y))));
            }
            Op::Tanh(a) => {
                res.push((a, zip_map(g, out, |gi, y| gi * (1.0 - y * y))));
            }
            Op::Relu(a) => {
                res.push((a, zip_map(g, out, |gi, y| if y > 0.0 { gi } else { 0.0 })));
            }
            Op::MeanRows(a) => {
                let [rows, cols] = self.shape_of(a);
                let mut ga = Matrix::zeros(rows, cols);
                let inv = 1.0 / rows as f64;
                for i in 0..rows {
                    for (x, &gj) in ga.row_mut(i).iter_mut().zip(g.as_slice()) {
                        *x = gj * inv;
                    }
                }
                res.push((a, ga));
            }
            Op::Scale(a, c) => res.push((a, g.map(|x| c * x))),
            Op::Transpose(a) => res.push((a, g.transpose())),
            Op::Reshape(a) => {
                let [r, c] = self.shape_of(a);
                res.push((a, g.reshaped(r, c)?));
            }
            Op::Sum(a) => {
                let [r, c] = self.shape_of(a);
                res.push((a, Matrix::filled(r, c, g.as_slice()[0])));
            }
            Op::Mse { truth, pred } => {
                let n = self.value(pred).len() as f64;
                let k = 2.0 * g.as_slice()[0] / n;
                let diff = zip_map(self.value(pred), self.value(truth), |p, y| k * (p - y));
                if self.wants(truth) {
                    res.push((truth, diff.map(|x| -x)));
                }
                if self.wants(pred) {
                    res.push((pred, diff));
                }
            }
        }
        Ok(res)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn accumulate(slot: &mut Option<Matrix>, g: Matrix) -> Result<()> {
    match slot {
        Some(existing) => existing.add_assign(&g),
        None => {
            *slot = Some(g);
            Ok(())
        }
    }
}

fn zip_map(a: &Matrix, b: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
    let data = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| f(x, y))
        .collect();
    Matrix::from_vec(a.rows(), a.cols(), data).expect("zip_map operands share a shape")
}

fn column_sums(g: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(1, g.cols());
    for i in 0..g.rows() {
        for (o, &x) in out.as_mut_slice().iter_mut().zip(g.row(i)) {
            *o += x;
        }
    }
    out
}
