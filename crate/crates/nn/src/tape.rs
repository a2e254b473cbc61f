use ndarray::{Array2, Axis, Zip};

use crate::{NnError, Result};

/// Handle to a node on a [`Tape`].
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
    /// `a + b` with `b` a single row broadcast over `a`'s rows.
    AddRow(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Minimum(Var, Var),
    Tanh(Var),
    Relu(Var),
    Exp(Var),
    Neg(Var),
    Square(Var),
    Scale(Var, f64),
    Clamp(Var, f64, f64),
    /// Row-wise log-softmax.
    LogSoftmax(Var),
    /// `out[i, 0] = a[i, cols[i]]`.
    Pick(Var, Vec<usize>),
    RowSum(Var),
    Sum(Var),
    Mean(Var),
}

#[derive(Debug, Clone)]
struct Node {
    value: Array2<f64>,
    op: Op,
}

/// Records matrix operations for reverse-mode differentiation.
#[derive(Debug, Clone, Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

/// Gradients of one scalar with respect to the leaves of a tape.
#[derive(Debug, Clone)]
pub struct Gradients {
    grads: Vec<Option<Array2<f64>>>,
    shapes: Vec<(usize, usize)>,
}

impl Gradients {
    /// Gradient of leaf `v`; zeros when the loss does not depend on it.
    /// Intermediate gradients are released during the sweep and read as zeros.
    pub fn get(&self, v: Var) -> Array2<f64> {
        match &self.grads[v.0] {
            Some(g) => g.clone(),
            None => Array2::zeros(self.shapes[v.0]),
        }
    }
}

fn dims(a: &Array2<f64>) -> (usize, usize) {
    a.dim()
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

    pub fn value(&self, v: Var) -> &Array2<f64> {
        &self.nodes[v.0].value
    }

    /// Scalar value of a 1x1 node.
    pub fn scalar(&self, v: Var) -> f64 {
        self.nodes[v.0].value[[0, 0]]
    }

    /// An input or parameter; gradients flow into it but not beyond.
    pub fn leaf(&mut self, value: Array2<f64>) -> Var {
        self.push(value, Op::Leaf)
    }

    fn push(&mut self, value: Array2<f64>, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    fn same_shape(&self, op: &'static str, a: Var, b: Var) -> Result<()> {
        let (l, r) = (dims(self.value(a)), dims(self.value(b)));
        if l != r {
            return Err(NnError::Shape { op, left: l, right: r });
        }
        Ok(())
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (l, r) = (dims(self.value(a)), dims(self.value(b)));
        if l.1 != r.0 {
            return Err(NnError::Shape { op: "matmul", left: l, right: r });
        }
        let v = self.value(a).dot(self.value(b));
        Ok(self.push(v, Op::MatMul(a, b)))
    }

    pub fn add_row(&mut self, a: Var, row: Var) -> Result<Var> {
        let (l, r) = (dims(self.value(a)), dims(self.value(row)));
        if r.0 != 1 || l.1 != r.1 {
            return Err(NnError::Shape { op: "add_row", left: l, right: r });
        }
        let v = self.value(a) + self.value(row);
        Ok(self.push(v, Op::AddRow(a, row)))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("add", a, b)?;
        let v = self.value(a) + self.value(b);
        Ok(self.push(v, Op::Add(a, b)))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("sub", a, b)?;
        let v = self.value(a) - self.value(b);
        Ok(self.push(v, Op::Sub(a, b)))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("mul", a, b)?;
        let v = self.value(a) * self.value(b);
        Ok(self.push(v, Op::Mul(a, b)))
    }

    /// Elementwise minimum; ties send the gradient to `a`.
    pub fn minimum(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("minimum", a, b)?;
        let mut v = self.value(a).clone();
        Zip::from(&mut v).and(self.value(b)).for_each(|x, &y| *x = x.min(y));
        Ok(self.push(v, Op::Minimum(a, b)))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(f64::tanh);
        self.push(v, Op::Tanh(a))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(|x| x.max(0.0));
        self.push(v, Op::Relu(a))
    }

    pub fn exp(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(f64::exp);
        self.push(v, Op::Exp(a))
    }

    pub fn neg(&mut self, a: Var) -> Var {
        let v = -self.value(a);
        self.push(v, Op::Neg(a))
    }

    pub fn square(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(|x| x * x);
        self.push(v, Op::Square(a))
    }

    pub fn scale(&mut self, a: Var, k: f64) -> Var {
        let v = self.value(a) * k;
        self.push(v, Op::Scale(a, k))
    }

    /// Clamps into `[lo, hi]`; the gradient is zero outside the open interval.
    pub fn clamp(&mut self, a: Var, lo: f64, hi: f64) -> Var {
        let v = self.value(a).mapv(|x| x.clamp(lo, hi));
        self.push(v, Op::Clamp(a, lo, hi))
    }

    pub fn log_softmax(&mut self, a: Var) -> Var {
        let mut v = self.value(a).clone();
        for mut row in v.rows_mut() {
            let max = row.fold(f64::NEG_INFINITY, |m, &x| m.max(x));
            let lse = max + row.iter().map(|&x| (x - max).exp()).sum::<f64>().ln();
            row.mapv_inplace(|x| x - lse);
        }
        self.push(v, Op::LogSoftmax(a))
    }

    pub fn pick(&mut self, a: Var, cols: &[usize]) -> Result<Var> {
        let (rows, width) = dims(self.value(a));
        if cols.len() != rows {
            return Err(NnError::Length { expected: rows, got: cols.len() });
        }
        if let Some(&bad) = cols.iter().find(|&&c| c >= width) {
            return Err(NnError::InvalidAction { action: bad, count: width });
        }
        let src = self.value(a);
        let v = Array2::from_shape_fn((rows, 1), |(i, _)| src[[i, cols[i]]]);
        Ok(self.push(v, Op::Pick(a, cols.to_vec())))
    }

    pub fn row_sum(&mut self, a: Var) -> Var {
        let v = self.value(a).sum_axis(Axis(1)).insert_axis(Axis(1));
        self.push(v, Op::RowSum(a))
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let v = Array2::from_elem((1, 1), self.value(a).sum());
        self.push(v, Op::Sum(a))
    }

    pub fn mean(&mut self, a: Var) -> Var {
        let n = self.value(a).len().max(1) as f64;
        let v = Array2::from_elem((1, 1), self.value(a).sum() / n);
        self.push(v, Op::Mean(a))
    }

    /// Reverse sweep from a 1x1 `loss`.
    pub fn backward(&self, loss: Var) -> Result<Gradients> {
        if loss.0 >= self.nodes.len() {
            return Err(NnError::ForeignVar(loss.0));
        }
        let (rows, cols) = dims(self.value(loss));
        if (rows, cols) != (1, 1) {
            return Err(NnError::NonScalarLoss { rows, cols });
        }
        let shapes: Vec<_> = self.nodes.iter().map(|n| dims(&n.value)).collect();
        let mut grads: Vec<Option<Array2<f64>>> = vec![None; self.nodes.len()];
        grads[loss.0] = Some(Array2::ones((1, 1)));
        for i in (0..=loss.0).rev() {
            let Some(g) = grads[i].take() else { continue };
            let node = &self.nodes[i];
            let mut acc = |v: Var, d: Array2<f64>| match &mut grads[v.0] {
                Some(existing) => *existing += &d,
                slot @ None => *slot = Some(d),
            };
            match &node.op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    acc(*a, g.dot(&self.value(*b).t()));
                    acc(*b, self.value(*a).t().dot(&g));
                }
                Op::AddRow(a, b) => {
                    acc(*b, g.sum_axis(Axis(0)).insert_axis(Axis(0)));
                    acc(*a, g.clone());
                }
                Op::Add(a, b) => {
                    acc(*a, g.clone());
                    acc(*b, g.clone());
                }
                Op::Sub(a, b) => {
                    acc(*b, -&g);
                    acc(*a, g.clone());
                }
                Op::Mul(a, b) => {
                    acc(*a, &g * self.value(*b));
                    acc(*b, &g * self.value(*a));
                }
                Op::Minimum(a, b) => {
                    let (va, vb) = (self.value(*a), self.value(*b));
                    let mut ga = g.clone();
                    let mut gb = g.clone();
                    Zip::from(&mut ga).and(&mut gb).and(va).and(vb).for_each(|ga, gb, &x, &y| {
                        if x <= y {
                            *gb = 0.0;
                        } else {
                            *ga = 0.0;
                        }
                    });
                    acc(*a, ga);
                    acc(*b, gb);
                }
                Op::Tanh(a) => acc(*a, &g * &node.value.mapv(|y| 1.0 - y * y)),
                Op::Relu(a) => acc(*a, &g * &self.value(*a).mapv(|x| if x > 0.0 { 1.0 } else { 0.0 })),
                Op::Exp(a) => acc(*a, &g * &node.value),
                Op::Neg(a) => acc(*a, -&g),
                Op::Square(a) => acc(*a, &g * &self.value(*a).mapv(|x| 2.0 * x)),
                Op::Scale(a, k) => acc(*a, &g * *k),
                Op::Clamp(a, lo, hi) => {
                    acc(*a, &g * &self.value(*a).mapv(|x| if x > *lo && x < *hi { 1.0 } else { 0.0 }))
                }
                Op::LogSoftmax(a) => {
                    // d/dx_j = g_j - softmax_j * sum_k g_k
                    let mut d = g.clone();
                    for (mut drow, yrow) in d.rows_mut().into_iter().zip(node.value.rows()) {
                        let total: f64 = drow.sum();
                        Zip::from(&mut drow).and(&yrow).for_each(|dj, &yj| *dj -= yj.exp() * total);
                    }
                    acc(*a, d);
                }
                Op::Pick(a, cols) => {
                    let mut d = Array2::zeros(shapes[a.0]);
                    for (i, &c) in cols.iter().enumerate() {
                        d[[i, c]] = g[[i, 0]];
                    }
                    acc(*a, d);
                }
                Op::RowSum(a) => {
                    let d = Array2::from_shape_fn(shapes[a.0], |(i, _)| g[[i, 0]]);
                    acc(*a, d);
                }
                Op::Sum(a) => acc(*a, Array2::from_elem(shapes[a.0], g[[0, 0]])),
                Op::Mean(a) => {
                    let (r, c) = shapes[a.0];
                    acc(*a, Array2::from_elem((r, c), g[[0, 0]] / (r * c).max(1) as f64));
                }
            }
            if matches!(node.op, Op::Leaf) {
                grads[i] = Some(g);
            }
        }
        Ok(Gradients { grads, shapes })
    }
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::*;

    /// Central differences of `f` with respect to every entry of `x`.
    fn numeric(x: &Array2<f64>, f: impl Fn(&Array2<f64>) -> f64) -> Array2<f64> {
        let h = 1e-6;
        Array2::from_shape_fn(x.dim(), |idx| {
            let mut p = x.clone();
            let mut m = x.clone();
            p[idx] += h;
            m[idx] -= h;
            (f(&p) - f(&m)) / (2.0 * h)
        })
    }

    fn check(x: Array2<f64>, build: impl Fn(&mut Tape, Var) -> Var) {
        let eval = |x: &Array2<f64>| {
            let mut t = Tape::new();
            let v = t.leaf(x.clone());
            let out = build(&mut t, v);
            t.scalar(out)
        };
        let mut t = Tape::new();
        let v = t.leaf(x.clone());
        let out = build(&mut t, v);
        let analytic = t.backward(out).unwrap().get(v);
        let numeric = numeric(&x, eval);
        for (a, n) in analytic.iter().zip(numeric.iter()) {
            assert!((a - n).abs() < 1e-7 * (1.0 + n.abs()), "analytic {a} numeric {n}");
        }
    }

    #[test]
    fn elementwise_ops() {
        let x = array![[0.3, -0.7, 1.1], [-0.2, 0.5, 0.9]];
        check(x.clone(), |t, v| {
            let a = t.tanh(v);
            let b = t.exp(a);
            let c = t.square(b);
            let d = t.scale(c, 0.5);
            t.sum(d)
        });
        check(x.clone(), |t, v| {
            let r = t.relu(v);
            let n = t.neg(v);
            let m = t.mul(r, n).unwrap();
            let c = t.clamp(v, -0.5, 1.0);
            let s = t.sub(m, c).unwrap();
            let mn = t.minimum(s, v).unwrap();
            t.mean(mn)
        });
    }

    #[test]
    fn softmax_pick_and_rowsum() {
        let x = array![[0.3, -0.7, 1.1], [-0.2, 0.5, 0.9]];
        check(x.clone(), |t, v| {
            let l = t.log_softmax(v);
            let p = t.pick(l, &[2, 0]).unwrap();
            let e = t.exp(l);
            let pl = t.mul(e, l).unwrap();
            let h = t.row_sum(pl);
            let s = t.add(p, h).unwrap();
            t.sum(s)
        });
    }

    #[test]
    fn affine_layer() {
        let w = array![[0.1, 0.2], [0.3, -0.4], [0.5, 0.6]];
        let x = array![[1.0, 2.0, 3.0]];
        check(w.clone(), |t, v| {
            let xi = t.leaf(x.clone());
            let b = t.leaf(array![[0.5, -0.5]]);
            let y = t.matmul(xi, v).unwrap();
            let z = t.add_row(y, b).unwrap();
            let s = t.square(z);
            t.sum(s)
        });
        // Sum of outputs of one affine layer: dW[i][j] = x[i].
        let mut t = Tape::new();
        let xi = t.leaf(x.clone());
        let wv = t.leaf(w);
        let y = t.matmul(xi, wv).unwrap();
        let s = t.sum(y);
        let g = t.backward(s).unwrap().get(wv);
        assert_eq!(g, array![[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]);
    }

    #[test]
    fn constant_loss_has_zero_gradient() {
        let mut t = Tape::new();
        let x = t.leaf(array![[1.0, 2.0]]);
        let c = t.leaf(array![[3.0]]);
        let g = t.backward(c).unwrap();
        assert_eq!(g.get(x), Array2::<f64>::zeros((1, 2)));
    }

    #[test]
    fn rejects_bad_losses() {
        let mut t = Tape::new();
        let x = t.leaf(array![[1.0, 2.0]]);
        assert!(matches!(t.backward(x), Err(NnError::NonScalarLoss { .. })));
        assert!(matches!(Tape::new().backward(x), Err(NnError::ForeignVar(0))));
        let y = t.leaf(array![[1.0], [2.0]]);
        assert!(matches!(t.add(x, y), Err(NnError::Shape { .. })));
    }
}
