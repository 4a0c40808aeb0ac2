use crate::error::{Result, TensorError};
use crate::tape::{slot, Node, Op, Var};
use crate::tensor::Tensor;

fn same_shape(op: &'static str, a: &Tensor, b: &Tensor) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(TensorError::Dimension {
            op,
            lhs: a.shape().to_vec(),
            rhs: b.shape().to_vec(),
        });
    }
    Ok(())
}

fn map(x: &Tensor, f: impl Fn(f64) -> f64) -> Tensor {
    Tensor::new(x.shape(), x.data().iter().map(|&v| f(v)).collect()).unwrap()
}

fn zip(a: &Tensor, b: &Tensor, f: impl Fn(f64, f64) -> f64) -> Tensor {
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| f(x, y)).collect();
    Tensor::new(a.shape(), data).unwrap()
}

fn logistic(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

impl<'t> Var<'t> {
    pub fn add(self, rhs: Var<'t>) -> Result<Var<'t>> {
        self.same_tape(&rhs);
        let (a, b) = (self.value(), rhs.value());
        same_shape("add", &a, &b)?;
        Ok(self.derive(zip(&a, &b, |x, y| x + y), Op::Add(self.id(), rhs.id())))
    }

    pub fn sub(self, rhs: Var<'t>) -> Result<Var<'t>> {
        self.same_tape(&rhs);
        let (a, b) = (self.value(), rhs.value());
        same_shape("sub", &a, &b)?;
        Ok(self.derive(zip(&a, &b, |x, y| x - y), Op::Sub(self.id(), rhs.id())))
    }

    /// Elementwise (Hadamard) product.
    pub fn mul(self, rhs: Var<'t>) -> Result<Var<'t>> {
        self.same_tape(&rhs);
        let (a, b) = (self.value(), rhs.value());
        same_shape("mul", &a, &b)?;
        Ok(self.derive(zip(&a, &b, |x, y| x * y), Op::Mul(self.id(), rhs.id())))
    }

    /// Adds `bias` (length = column count) to every row.
    pub fn add_row(self, bias: Var<'t>) -> Result<Var<'t>> {
        self.same_tape(&bias);
        let x = self.value();
        let b = bias.value();
        if b.numel() != x.cols() {
            return Err(TensorError::Dimension {
                op: "add_row",
                lhs: x.shape().to_vec(),
                rhs: b.shape().to_vec(),
            });
        }
        let c = x.cols();
        let data = x
            .data()
            .iter()
            .enumerate()
            .map(|(i, v)| v + b.data()[i % c])
            .collect();
        Ok(self.derive(
            Tensor::new(x.shape(), data)?,
            Op::AddRow {
                x: self.id(),
                bias: bias.id(),
            },
        ))
    }

    /// `scale * self + shift` with constant coefficients.
    pub fn affine(self, scale: f64, shift: f64) -> Var<'t> {
        let x = self.value();
        self.derive(
            map(&x, |v| scale * v + shift),
            Op::Affine {
                x: self.id(),
                scale,
            },
        )
    }

    pub fn scale(self, factor: f64) -> Var<'t> {
        self.affine(factor, 0.0)
    }

    /// Multiplies every element by the single value held in `s`.
    pub fn scale_by(self, s: Var<'t>) -> Result<Var<'t>> {
        self.same_tape(&s);
        let x = self.value();
        let sv = s.value();
        if sv.numel() != 1 {
            return Err(TensorError::Dimension {
                op: "scale_by",
                lhs: x.shape().to_vec(),
                rhs: sv.shape().to_vec(),
            });
        }
        let k = sv.data()[0];
        Ok(self.derive(
            map(&x, |v| k * v),
            Op::ScaleBy {
                x: self.id(),
                s: s.id(),
            },
        ))
    }

    pub fn tanh(self) -> Var<'t> {
        let x = self.value();
        self.derive(map(&x, f64::tanh), Op::Tanh(self.id()))
    }

    pub fn sigmoid(self) -> Var<'t> {
        let x = self.value();
        self.derive(map(&x, logistic), Op::Sigmoid(self.id()))
    }

    pub fn relu(self) -> Var<'t> {
        let x = self.value();
        self.derive(map(&x, |v| v.max(0.0)), Op::Relu(self.id()))
    }

    pub fn exp(self) -> Var<'t> {
        let x = self.value();
        self.derive(map(&x, f64::exp), Op::Exp(self.id()))
    }

    pub fn ln(self) -> Var<'t> {
        let x = self.value();
        self.derive(map(&x, f64::ln), Op::Log(self.id()))
    }

    /// `out[i][j] = col[i] + row[j]` for vectors of lengths `a` and `b`.
    pub fn outer_sum(col: Var<'t>, row: Var<'t>) -> Result<Var<'t>> {
        col.same_tape(&row);
        let c = col.value();
        let r = row.value();
        let (a, b) = (c.numel(), r.numel());
        let mut data = Vec::with_capacity(a * b);
        for &ci in c.data() {
            data.extend(r.data().iter().map(|&rj| ci + rj));
        }
        Ok(col.derive(
            Tensor::matrix(a, b, data)?,
            Op::OuterSum {
                col: col.id(),
                row: row.id(),
            },
        ))
    }
}

pub(super) fn backward(nodes: &[Node], id: usize, g: &[f64], grads: &mut [Option<Vec<f64>>]) {
    let out = &nodes[id].value;
    match nodes[id].op {
        Op::Add(a, b) => {
            for input in [a, b] {
                if let Some(s) = slot(nodes, grads, input) {
                    s.iter_mut().zip(g).for_each(|(s, g)| *s += g);
                }
            }
        }
        Op::Sub(a, b) => {
            if let Some(s) = slot(nodes, grads, a) {
                s.iter_mut().zip(g).for_each(|(s, g)| *s += g);
            }
            if let Some(s) = slot(nodes, grads, b) {
                s.iter_mut().zip(g).for_each(|(s, g)| *s -= g);
            }
        }
        Op::Mul(a, b) => {
            let av = nodes[a].value.clone();
            let bv = nodes[b].value.clone();
            if let Some(s) = slot(nodes, grads, a) {
                for ((s, g), y) in s.iter_mut().zip(g).zip(bv.data()) {
                    *s += g * y;
                }
            }
            if let Some(s) = slot(nodes, grads, b) {
                for ((s, g), x) in s.iter_mut().zip(g).zip(av.data()) {
                    *s += g * x;
                }
            }
        }
        Op::AddRow { x, bias } => {
            if let Some(s) = slot(nodes, grads, x) {
                s.iter_mut().zip(g).for_each(|(s, g)| *s += g);
            }
            let c = out.cols();
            if let Some(s) = slot(nodes, grads, bias) {
                for row in g.chunks(c) {
                    s.iter_mut().zip(row).for_each(|(s, g)| *s += g);
                }
            }
        }
        Op::Affine { x, scale } => {
            if let Some(s) = slot(nodes, grads, x) {
                s.iter_mut().zip(g).for_each(|(s, g)| *s += scale * g);
            }
        }
        Op::ScaleBy { x, s: sid } => {
            let k = nodes[sid].value.data()[0];
            let xv = nodes[x].value.clone();
            if let Some(s) = slot(nodes, grads, x) {
                s.iter_mut().zip(g).for_each(|(s, g)| *s += k * g);
            }
            if let Some(s) = slot(nodes, grads, sid) {
                s[0] += super::dot(g, xv.data());
            }
        }
        Op::Tanh(x) => {
            if let Some(s) = slot(nodes, grads, x) {
                for ((s, g), y) in s.iter_mut().zip(g).zip(out.data()) {
                    *s += g * (1.0 - y * y);
                }
            }
        }
        Op::Sigmoid(x) => {
            if let Some(s) = slot(nodes, grads, x) {
                for ((s, g), y) in s.iter_mut().zip(g).zip(out.data()) {
                    *s += g * y * (1.0 - y);
                }
            }
        }
        Op::Relu(x) => {
            let xv = nodes[x].value.clone();
            if let Some(s) = slot(nodes, grads, x) {
                for ((s, g), v) in s.iter_mut().zip(g).zip(xv.data()) {
                    if *v > 0.0 {
                        *s += g;
                    }
                }
            }
        }
        Op::Exp(x) => {
            if let Some(s) = slot(nodes, grads, x) {
                for ((s, g), y) in s.iter_mut().zip(g).zip(out.data()) {
                    *s += g * y;
                }
            }
        }
        Op::Log(x) => {
            let xv = nodes[x].value.clone();
            if let Some(s) = slot(nodes, grads, x) {
                for ((s, g), v) in s.iter_mut().zip(g).zip(xv.data()) {
                    *s += g / v;
                }
            }
        }
        Op::OuterSum { col, row } => {
            let b = out.cols();
            if let Some(s) = slot(nodes, grads, col) {
                for (si, grow) in s.iter_mut().zip(g.chunks(b)) {
                    *si += grow.iter().sum::<f64>();
                }
            }
            if let Some(s) = slot(nodes, grads, row) {
                for grow in g.chunks(b) {
                    s.iter_mut().zip(grow).for_each(|(s, g)| *s += g);
                }
            }
        }
        _ => unreachable!("not an elementwise op"),
    }
}
