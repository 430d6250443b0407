//! Differentiable operations. Every op builds its output eagerly and, when
//! any input tracks gradients, registers a backward closure that reads the
//! output node's gradient and accumulates into the parents.

use crate::kernels::{mm_acc, mm_ta_acc, mm_tb_acc};
use crate::scalar::Scalar;
use crate::tensor::{assert_same_shape, Tensor};

impl<T: Scalar> Tensor<T> {
    pub fn add(&self, other: &Tensor<T>) -> Tensor<T> {
        assert_same_shape("add", self, other);
        let (r, c) = self.shape();
        let data = {
            let a = self.inner.data.borrow();
            let b = other.inner.data.borrow();
            a.iter().zip(b.iter()).map(|(&x, &y)| x + y).collect()
        };
        let pa = self.clone();
        let pb = other.clone();
        Tensor::make(r, c, data, vec![self.clone(), other.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                for p in [&pa, &pb] {
                    if p.inner.requires_grad {
                        p.inner.with_grad_mut(|dst| {
                            for (d, &gi) in dst.iter_mut().zip(g.iter()) {
                                *d = *d + gi;
                            }
                        });
                    }
                }
            })
        })
    }

    pub fn sub(&self, other: &Tensor<T>) -> Tensor<T> {
        assert_same_shape("sub", self, other);
        let (r, c) = self.shape();
        let data = {
            let a = self.inner.data.borrow();
            let b = other.inner.data.borrow();
            a.iter().zip(b.iter()).map(|(&x, &y)| x - y).collect()
        };
        let pa = self.clone();
        let pb = other.clone();
        Tensor::make(r, c, data, vec![self.clone(), other.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                if pa.inner.requires_grad {
                    pa.inner.with_grad_mut(|dst| {
                        for (d, &gi) in dst.iter_mut().zip(g.iter()) {
                            *d = *d + gi;
                        }
                    });
                }
                if pb.inner.requires_grad {
                    pb.inner.with_grad_mut(|dst| {
                        for (d, &gi) in dst.iter_mut().zip(g.iter()) {
                            *d = *d - gi;
                        }
                    });
                }
            })
        })
    }

    /// Elementwise product.
    pub fn mul(&self, other: &Tensor<T>) -> Tensor<T> {
        assert_same_shape("mul", self, other);
        let (r, c) = self.shape();
        let data = {
            let a = self.inner.data.borrow();
            let b = other.inner.data.borrow();
            a.iter().zip(b.iter()).map(|(&x, &y)| x * y).collect()
        };
        let pa = self.clone();
        let pb = other.clone();
        Tensor::make(r, c, data, vec![self.clone(), other.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                if pa.inner.requires_grad {
                    let b = pb.inner.data.borrow();
                    pa.inner.with_grad_mut(|dst| {
                        for i in 0..dst.len() {
                            dst[i] = dst[i] + g[i] * b[i];
                        }
                    });
                }
                if pb.inner.requires_grad {
                    let a = pa.inner.data.borrow();
                    pb.inner.with_grad_mut(|dst| {
                        for i in 0..dst.len() {
                            dst[i] = dst[i] + g[i] * a[i];
                        }
                    });
                }
            })
        })
    }

    pub fn mul_scalar(&self, s: f64) -> Tensor<T> {
        let (r, c) = self.shape();
        let sv = T::from_f64(s);
        let data = self.inner.data.borrow().iter().map(|&x| x * sv).collect();
        let pa = self.clone();
        Tensor::make(r, c, data, vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                pa.inner.with_grad_mut(|dst| {
                    for i in 0..dst.len() {
                        dst[i] = dst[i] + g[i] * sv;
                    }
                });
            })
        })
    }

    pub fn add_scalar(&self, s: f64) -> Tensor<T> {
        let (r, c) = self.shape();
        let sv = T::from_f64(s);
        let data = self.inner.data.borrow().iter().map(|&x| x + sv).collect();
        let pa = self.clone();
        Tensor::make(r, c, data, vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                pa.inner.with_grad_mut(|dst| {
                    for i in 0..dst.len() {
                        dst[i] = dst[i] + g[i];
                    }
                });
            })
        })
    }

    /// Adds a `[1, cols]` bias to every row.
    pub fn add_bias(&self, bias: &Tensor<T>) -> Tensor<T> {
        let (r, c) = self.shape();
        assert_eq!(
            bias.shape(),
            (1, c),
            "add_bias: bias shape {:?} does not fit input {:?}",
            bias.shape(),
            self.shape()
        );
        let data = {
            let a = self.inner.data.borrow();
            let b = bias.inner.data.borrow();
            let mut out = Vec::with_capacity(r * c);
            for row in 0..r {
                for j in 0..c {
                    out.push(a[row * c + j] + b[j]);
                }
            }
            out
        };
        let pa = self.clone();
        let pb = bias.clone();
        Tensor::make(r, c, data, vec![self.clone(), bias.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                if pa.inner.requires_grad {
                    pa.inner.with_grad_mut(|dst| {
                        for i in 0..dst.len() {
                            dst[i] = dst[i] + g[i];
                        }
                    });
                }
                if pb.inner.requires_grad {
                    let mut db = vec![T::zero(); c];
                    for row in 0..r {
                        for j in 0..c {
                            db[j] = db[j] + g[row * c + j];
                        }
                    }
                    pb.inner.accumulate_grad(&db);
                }
            })
        })
    }

    /// `[m,k] x [k,n] -> [m,n]`.
    pub fn matmul(&self, other: &Tensor<T>) -> Tensor<T> {
        let (m, k) = self.shape();
        let (k2, n) = other.shape();
        assert_eq!(
            k, k2,
            "matmul: inner dimensions disagree, {:?} x {:?}",
            self.shape(),
            other.shape()
        );
        let mut out = vec![T::zero(); m * n];
        mm_acc(
            &mut out,
            &self.inner.data.borrow(),
            &other.inner.data.borrow(),
            m,
            k,
            n,
        );
        let pa = self.clone();
        let pb = other.clone();
        Tensor::make(m, n, out, vec![self.clone(), other.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                if pa.inner.requires_grad {
                    let b = pb.inner.data.borrow();
                    let mut da = vec![T::zero(); m * k];
                    mm_tb_acc(&mut da, &g, &b, m, n, k);
                    pa.inner.accumulate_grad(&da);
                }
                if pb.inner.requires_grad {
                    let a = pa.inner.data.borrow();
                    let mut db = vec![T::zero(); k * n];
                    mm_ta_acc(&mut db, &a, &g, m, k, n);
                    pb.inner.accumulate_grad(&db);
                }
            })
        })
    }

    /// `[m,k] x [n,k]^T -> [m,n]`: the second operand is stored row-major in
    /// its transposed form, the layout weight matrices use.
    pub fn matmul_tb(&self, other: &Tensor<T>) -> Tensor<T> {
        let (m, k) = self.shape();
        let (n, k2) = other.shape();
        assert_eq!(
            k, k2,
            "matmul_tb: inner dimensions disagree, {:?} x {:?}^T",
            self.shape(),
            other.shape()
        );
        let mut out = vec![T::zero(); m * n];
        mm_tb_acc(
            &mut out,
            &self.inner.data.borrow(),
            &other.inner.data.borrow(),
            m,
            k,
            n,
        );
        let pa = self.clone();
        let pb = other.clone();
        Tensor::make(m, n, out, vec![self.clone(), other.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                if pa.inner.requires_grad {
                    let b = pb.inner.data.borrow();
                    let mut da = vec![T::zero(); m * k];
                    mm_acc(&mut da, &g, &b, m, n, k);
                    pa.inner.accumulate_grad(&da);
                }
                if pb.inner.requires_grad {
                    let a = pa.inner.data.borrow();
                    let mut db = vec![T::zero(); n * k];
                    mm_ta_acc(&mut db, &g, &a, m, n, k);
                    pb.inner.accumulate_grad(&db);
                }
            })
        })
    }

    /// Row-wise softmax with the max-subtraction trick. A logit offset of
    /// -1e9 underflows `exp` to exactly 0.0, which is what the attention
    /// masks rely on.
    pub fn softmax_rows(&self) -> Tensor<T> {
        let (r, c) = self.shape();
        assert!(c > 0, "softmax_rows: empty rows");
        let mut out = vec![T::zero(); r * c];
        {
            let x = self.inner.data.borrow();
            for row in 0..r {
                let xr = &x[row * c..(row + 1) * c];
                let mut m = xr[0];
                for &v in xr {
                    if v > m {
                        m = v;
                    }
                }
                let mut denom = T::zero();
                for (j, &v) in xr.iter().enumerate() {
                    let e = (v - m).exp();
                    out[row * c + j] = e;
                    denom = denom + e;
                }
                for j in 0..c {
                    out[row * c + j] = out[row * c + j] / denom;
                }
            }
        }
        let pa = self.clone();
        Tensor::make(r, c, out, vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                let y = node.data.borrow();
                pa.inner.with_grad_mut(|dst| {
                    for row in 0..r {
                        let yr = &y[row * c..(row + 1) * c];
                        let gr = &g[row * c..(row + 1) * c];
                        let mut dotgy = T::zero();
                        for j in 0..c {
                            dotgy = dotgy + gr[j] * yr[j];
                        }
                        let dr = &mut dst[row * c..(row + 1) * c];
                        for j in 0..c {
                            dr[j] = dr[j] + yr[j] * (gr[j] - dotgy);
                        }
                    }
                });
            })
        })
    }

    /// Per-row normalization with learned scale and shift (`gamma`, `beta`
    /// are `[1, cols]`); variance is the biased estimate.
    pub fn layer_norm(&self, gamma: &Tensor<T>, beta: &Tensor<T>, eps: f64) -> Tensor<T> {
        let (r, c) = self.shape();
        assert_eq!(
            gamma.shape(),
            (1, c),
            "layer_norm: gamma shape {:?} does not fit input {:?}",
            gamma.shape(),
            self.shape()
        );
        assert_eq!(
            beta.shape(),
            (1, c),
            "layer_norm: beta shape {:?} does not fit input {:?}",
            beta.shape(),
            self.shape()
        );
        let epsv = T::from_f64(eps);
        let nf = T::from_f64(c as f64);

        let mut out = vec![T::zero(); r * c];
        let mut xhat = vec![T::zero(); r * c];
        let mut inv_std = vec![T::zero(); r];
        {
            let x = self.inner.data.borrow();
            let gm = gamma.inner.data.borrow();
            let bt = beta.inner.data.borrow();
            for row in 0..r {
                let xr = &x[row * c..(row + 1) * c];
                let mut mean = T::zero();
                for &v in xr {
                    mean = mean + v;
                }
                mean = mean / nf;
                let mut var = T::zero();
                for &v in xr {
                    let d = v - mean;
                    var = var + d * d;
                }
                var = var / nf;
                let istd = T::one() / (var + epsv).sqrt();
                inv_std[row] = istd;
                for j in 0..c {
                    let h = (xr[j] - mean) * istd;
                    xhat[row * c + j] = h;
                    out[row * c + j] = gm[j] * h + bt[j];
                }
            }
        }

        let pa = self.clone();
        let pg = gamma.clone();
        let pbeta = beta.clone();
        Tensor::make(
            r,
            c,
            out,
            vec![self.clone(), gamma.clone(), beta.clone()],
            move || {
                Box::new(move |node| {
                    let g = node.grad.borrow();
                    if pg.inner.requires_grad {
                        let mut dgamma = vec![T::zero(); c];
                        for row in 0..r {
                            for j in 0..c {
                                dgamma[j] = dgamma[j] + g[row * c + j] * xhat[row * c + j];
                            }
                        }
                        pg.inner.accumulate_grad(&dgamma);
                    }
                    if pbeta.inner.requires_grad {
                        let mut dbeta = vec![T::zero(); c];
                        for row in 0..r {
                            for j in 0..c {
                                dbeta[j] = dbeta[j] + g[row * c + j];
                            }
                        }
                        pbeta.inner.accumulate_grad(&dbeta);
                    }
                    if pa.inner.requires_grad {
                        let gm = pg.inner.data.borrow();
                        pa.inner.with_grad_mut(|dst| {
                            for row in 0..r {
                                let gr = &g[row * c..(row + 1) * c];
                                let hr = &xhat[row * c..(row + 1) * c];
                                let mut sum_gg = T::zero();
                                let mut sum_ggh = T::zero();
                                for j in 0..c {
                                    let gg = gr[j] * gm[j];
                                    sum_gg = sum_gg + gg;
                                    sum_ggh = sum_ggh + gg * hr[j];
                                }
                                let mean_gg = sum_gg / nf;
                                let mean_ggh = sum_ggh / nf;
                                let istd = inv_std[row];
                                let dr = &mut dst[row * c..(row + 1) * c];
                                for j in 0..c {
                                    let gg = gr[j] * gm[j];
                                    dr[j] = dr[j] + (gg - mean_gg - hr[j] * mean_ggh) * istd;
                                }
                            }
                        });
                    }
                })
            },
        )
    }

    /// GELU in its tanh form:
    /// `0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3)))`.
    pub fn gelu(&self) -> Tensor<T> {
        let (r, c) = self.shape();
        let k = T::from_f64(0.797_884_560_802_865_4); // sqrt(2/pi)
        let a = T::from_f64(0.044_715);
        let half = T::from_f64(0.5);
        let data: Vec<T> = self
            .inner
            .data
            .borrow()
            .iter()
            .map(|&x| {
                let u = k * (x + a * x * x * x);
                half * x * (T::one() + u.tanh())
            })
            .collect();
        let pa = self.clone();
        Tensor::make(r, c, data, vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                let x = pa.inner.data.borrow();
                pa.inner.with_grad_mut(|dst| {
                    let three = T::from_f64(3.0);
                    for i in 0..dst.len() {
                        let xi = x[i];
                        let u = k * (xi + a * xi * xi * xi);
                        let t = u.tanh();
                        let sech2 = T::one() - t * t;
                        let du = k * (T::one() + three * a * xi * xi);
                        let d = half * (T::one() + t) + half * xi * sech2 * du;
                        dst[i] = dst[i] + g[i] * d;
                    }
                });
            })
        })
    }

    /// Rotary embedding: consecutive column pairs `(2i, 2i+1)` of each row
    /// rotate by `theta[row, i]`. Gradients flow to both the inputs and the
    /// angles, so angle tables can be learned.
    pub fn rope(&self, theta: &Tensor<T>) -> Tensor<T> {
        let (r, c) = self.shape();
        assert!(c % 2 == 0, "rope: column count {c} must be even");
        assert_eq!(
            theta.shape(),
            (r, c / 2),
            "rope: theta shape {:?} does not fit input {:?}",
            theta.shape(),
            self.shape()
        );
        let mut out = vec![T::zero(); r * c];
        {
            let x = self.inner.data.borrow();
            let th = theta.inner.data.borrow();
            for row in 0..r {
                for i in 0..c / 2 {
                    let ang = th[row * (c / 2) + i];
                    let (sin, cos) = (ang.sin(), ang.cos());
                    let x0 = x[row * c + 2 * i];
                    let x1 = x[row * c + 2 * i + 1];
                    out[row * c + 2 * i] = x0 * cos - x1 * sin;
                    out[row * c + 2 * i + 1] = x0 * sin + x1 * cos;
                }
            }
        }
        let pa = self.clone();
        let pt = theta.clone();
        Tensor::make(r, c, out, vec![self.clone(), theta.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                let x = pa.inner.data.borrow();
                let th = pt.inner.data.borrow();
                if pa.inner.requires_grad {
                    pa.inner.with_grad_mut(|dst| {
                        for row in 0..r {
                            for i in 0..c / 2 {
                                let ang = th[row * (c / 2) + i];
                                let (sin, cos) = (ang.sin(), ang.cos());
                                let g0 = g[row * c + 2 * i];
                                let g1 = g[row * c + 2 * i + 1];
                                dst[row * c + 2 * i] = dst[row * c + 2 * i] + g0 * cos + g1 * sin;
                                dst[row * c + 2 * i + 1] =
                                    dst[row * c + 2 * i + 1] - g0 * sin + g1 * cos;
                            }
                        }
                    });
                }
                if pt.inner.requires_grad {
                    pt.inner.with_grad_mut(|dst| {
                        for row in 0..r {
                            for i in 0..c / 2 {
                                let ang = th[row * (c / 2) + i];
                                let (sin, cos) = (ang.sin(), ang.cos());
                                let x0 = x[row * c + 2 * i];
                                let x1 = x[row * c + 2 * i + 1];
                                let g0 = g[row * c + 2 * i];
                                let g1 = g[row * c + 2 * i + 1];
                                let d = g0 * (-x0 * sin - x1 * cos) + g1 * (x0 * cos - x1 * sin);
                                dst[row * (c / 2) + i] = dst[row * (c / 2) + i] + d;
                            }
                        }
                    });
                }
            })
        })
    }

    /// Cuts a multi-channel image (`rows` = channels, `cols` = h*w) into
    /// non-overlapping square patches. Output row `gi * (w/p) + gj` holds
    /// patch `(gi, gj)` as channel-major, row-major pixels (`channels * p^2`
    /// values).
    pub fn im2patches(&self, height: usize, width: usize, patch: usize) -> Tensor<T> {
        let (channels, hw) = self.shape();
        assert_eq!(
            hw,
            height * width,
            "im2patches: {channels}x{hw} input does not match {height}x{width} image"
        );
        assert!(
            patch > 0 && height % patch == 0 && width % patch == 0,
            "im2patches: patch {patch} must divide image {height}x{width}"
        );
        let (gh, gw) = (height / patch, width / patch);
        let out_rows = gh * gw;
        let out_cols = channels * patch * patch;
        let mut out = vec![T::zero(); out_rows * out_cols];
        {
            let x = self.inner.data.borrow();
            for gi in 0..gh {
                for gj in 0..gw {
                    let pr = gi * gw + gj;
                    for ch in 0..channels {
                        for pi in 0..patch {
                            for pj in 0..patch {
                                let src = ch * hw + (gi * patch + pi) * width + gj * patch + pj;
                                let dst =
                                    pr * out_cols + ch * patch * patch + pi * patch + pj;
                                out[dst] = x[src];
                            }
                        }
                    }
                }
            }
        }
        let pa = self.clone();
        Tensor::make(out_rows, out_cols, out, vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                pa.inner.with_grad_mut(|dst| {
                    for gi in 0..gh {
                        for gj in 0..gw {
                            let pr = gi * gw + gj;
                            for ch in 0..channels {
                                for pi in 0..patch {
                                    for pj in 0..patch {
                                        let src =
                                            ch * hw + (gi * patch + pi) * width + gj * patch + pj;
                                        let gsrc =
                                            pr * out_cols + ch * patch * patch + pi * patch + pj;
                                        dst[src] = dst[src] + g[gsrc];
                                    }
                                }
                            }
                        }
                    }
                });
            })
        })
    }

    /// Inverse of the single-channel patch split: rows are patches over a
    /// `grid_h x grid_w` grid, each `patch^2` pixels, reassembled into a
    /// `[1, (grid_h*patch)*(grid_w*patch)]` image.
    pub fn patches_to_image(&self, grid_h: usize, grid_w: usize, patch: usize) -> Tensor<T> {
        let (rows, cols) = self.shape();
        assert_eq!(
            rows,
            grid_h * grid_w,
            "patches_to_image: {rows} rows vs {grid_h}x{grid_w} grid"
        );
        assert_eq!(
            cols,
            patch * patch,
            "patches_to_image: {cols} cols vs patch {patch}"
        );
        let width = grid_w * patch;
        let n = grid_h * patch * width;
        let mut out = vec![T::zero(); n];
        {
            let x = self.inner.data.borrow();
            for gi in 0..grid_h {
                for gj in 0..grid_w {
                    let pr = gi * grid_w + gj;
                    for pi in 0..patch {
                        for pj in 0..patch {
                            out[(gi * patch + pi) * width + gj * patch + pj] =
                                x[pr * cols + pi * patch + pj];
                        }
                    }
                }
            }
        }
        let pa = self.clone();
        Tensor::make(1, n, out, vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                pa.inner.with_grad_mut(|dst| {
                    for gi in 0..grid_h {
                        for gj in 0..grid_w {
                            let pr = gi * grid_w + gj;
                            for pi in 0..patch {
                                for pj in 0..patch {
                                    let gi_ = g[(gi * patch + pi) * width + gj * patch + pj];
                                    let d = pr * cols + pi * patch + pj;
                                    dst[d] = dst[d] + gi_;
                                }
                            }
                        }
                    }
                });
            })
        })
    }

    /// Picks rows by index (embedding lookup). Repeated indices accumulate
    /// their gradients into the same table row.
    pub fn gather_rows(&self, indices: &[usize]) -> Tensor<T> {
        let (r, c) = self.shape();
        for &i in indices {
            assert!(i < r, "gather_rows: index {i} out of range for {r} rows");
        }
        let mut out = Vec::with_capacity(indices.len() * c);
        {
            let x = self.inner.data.borrow();
            for &i in indices {
                out.extend_from_slice(&x[i * c..(i + 1) * c]);
            }
        }
        let pa = self.clone();
        let idx: Vec<usize> = indices.to_vec();
        Tensor::make(indices.len(), c, out, vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                let mut table = vec![T::zero(); r * c];
                for (row, &i) in idx.iter().enumerate() {
                    for j in 0..c {
                        table[i * c + j] = table[i * c + j] + g[row * c + j];
                    }
                }
                pa.inner.accumulate_grad(&table);
            })
        })
    }

    /// Stacks tensors with equal column counts on top of each other.
    pub fn concat_rows(parts: &[&Tensor<T>]) -> Tensor<T> {
        assert!(!parts.is_empty(), "concat_rows: no inputs");
        let c = parts[0].cols();
        let mut total_rows = 0;
        for p in parts {
            assert_eq!(
                p.cols(),
                c,
                "concat_rows: column mismatch {:?} vs {c}",
                p.shape()
            );
            total_rows += p.rows();
        }
        let mut data = Vec::with_capacity(total_rows * c);
        for p in parts {
            data.extend_from_slice(&p.inner.data.borrow());
        }
        let owned: Vec<Tensor<T>> = parts.iter().map(|p| (*p).clone()).collect();
        let own2 = owned.clone();
        Tensor::make(total_rows, c, data, owned, move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                let mut offset = 0;
                for p in &own2 {
                    let len = p.numel();
                    if p.inner.requires_grad {
                        let block = &g[offset..offset + len];
                        p.inner.with_grad_mut(|dst| {
                            for i in 0..len {
                                dst[i] = dst[i] + block[i];
                            }
                        });
                    }
                    offset += len;
                }
            })
        })
    }

    /// Stacks tensors with equal row counts side by side.
    pub fn concat_cols(parts: &[&Tensor<T>]) -> Tensor<T> {
        assert!(!parts.is_empty(), "concat_cols: no inputs");
        let r = parts[0].rows();
        let mut total_cols = 0;
        for p in parts {
            assert_eq!(
                p.rows(),
                r,
                "concat_cols: row mismatch {:?} vs {r}",
                p.shape()
            );
            total_cols += p.cols();
        }
        let mut data = Vec::with_capacity(r * total_cols);
        for row in 0..r {
            for p in parts {
                let c = p.cols();
                data.extend_from_slice(&p.inner.data.borrow()[row * c..(row + 1) * c]);
            }
        }
        let owned: Vec<Tensor<T>> = parts.iter().map(|p| (*p).clone()).collect();
        let own2 = owned.clone();
        Tensor::make(r, total_cols, data, owned, move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                let mut col_off = 0;
                for p in &own2 {
                    let c = p.cols();
                    if p.inner.requires_grad {
                        p.inner.with_grad_mut(|dst| {
                            for row in 0..r {
                                for j in 0..c {
                                    dst[row * c + j] =
                                        dst[row * c + j] + g[row * total_cols + col_off + j];
                                }
                            }
                        });
                    }
                    col_off += c;
                }
            })
        })
    }

    pub fn slice_rows(&self, start: usize, len: usize) -> Tensor<T> {
        let (r, c) = self.shape();
        assert!(
            start + len <= r,
            "slice_rows: rows {start}..{} out of range for {r}",
            start + len
        );
        let data = self.inner.data.borrow()[start * c..(start + len) * c].to_vec();
        let pa = self.clone();
        Tensor::make(len, c, data, vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                pa.inner.with_grad_mut(|dst| {
                    for i in 0..len * c {
                        dst[start * c + i] = dst[start * c + i] + g[i];
                    }
                });
            })
        })
    }

    pub fn slice_cols(&self, start: usize, len: usize) -> Tensor<T> {
        let (r, c) = self.shape();
        assert!(
            start + len <= c,
            "slice_cols: cols {start}..{} out of range for {c}",
            start + len
        );
        let mut data = Vec::with_capacity(r * len);
        {
            let x = self.inner.data.borrow();
            for row in 0..r {
                data.extend_from_slice(&x[row * c + start..row * c + start + len]);
            }
        }
        let pa = self.clone();
        Tensor::make(r, len, data, vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                pa.inner.with_grad_mut(|dst| {
                    for row in 0..r {
                        for j in 0..len {
                            dst[row * c + start + j] = dst[row * c + start + j] + g[row * len + j];
                        }
                    }
                });
            })
        })
    }

    /// Reinterprets the row-major buffer under a new shape with the same
    /// element count.
    pub fn reshape(&self, rows: usize, cols: usize) -> Tensor<T> {
        assert_eq!(
            rows * cols,
            self.numel(),
            "reshape: cannot view {:?} as {rows}x{cols}",
            self.shape()
        );
        let data = self.inner.data.borrow().clone();
        let pa = self.clone();
        Tensor::make(rows, cols, data, vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow();
                pa.inner.with_grad_mut(|dst| {
                    for i in 0..dst.len() {
                        dst[i] = dst[i] + g[i];
                    }
                });
            })
        })
    }

    pub fn sum(&self) -> Tensor<T> {
        let mut s = T::zero();
        for &v in self.inner.data.borrow().iter() {
            s = s + v;
        }
        let pa = self.clone();
        Tensor::make(1, 1, vec![s], vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow()[0];
                pa.inner.with_grad_mut(|dst| {
                    for d in dst.iter_mut() {
                        *d = *d + g;
                    }
                });
            })
        })
    }

    pub fn mean(&self) -> Tensor<T> {
        let n = self.numel();
        let scale = T::from_f64(1.0 / n as f64);
        let mut s = T::zero();
        for &v in self.inner.data.borrow().iter() {
            s = s + v;
        }
        let pa = self.clone();
        Tensor::make(1, 1, vec![s * scale], vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow()[0] * scale;
                pa.inner.with_grad_mut(|dst| {
                    for d in dst.iter_mut() {
                        *d = *d + g;
                    }
                });
            })
        })
    }

    /// Cross-entropy between row distributions: `targets` rows must be
    /// nonnegative and sum to 1 (checked, panics otherwise); the result is
    /// the mean row loss. Log-sum-exp runs in f64 regardless of `T`.
    pub fn cross_entropy_rows(&self, targets: &Tensor<T>) -> Tensor<T> {
        assert_same_shape("cross_entropy_rows", self, targets);
        let (r, c) = self.shape();
        {
            let t = targets.inner.data.borrow();
            for row in 0..r {
                let mut s = 0.0f64;
                for j in 0..c {
                    let v = t[row * c + j].to_f64();
                    assert!(
                        v >= 0.0,
                        "cross_entropy_rows: target row {row} has a negative entry"
                    );
                    s += v;
                }
                assert!(
                    (s - 1.0).abs() <= 1e-4,
                    "cross_entropy_rows: target row {row} is not normalized (sum {s})"
                );
            }
        }
        let mut total = 0.0f64;
        {
            let x = self.inner.data.borrow();
            let t = targets.inner.data.borrow();
            for row in 0..r {
                let xr = &x[row * c..(row + 1) * c];
                let mut m = f64::NEG_INFINITY;
                for &v in xr {
                    m = m.max(v.to_f64());
                }
                let mut denom = 0.0f64;
                for &v in xr {
                    denom += (v.to_f64() - m).exp();
                }
                let lse = m + denom.ln();
                for j in 0..c {
                    let tv = t[row * c + j].to_f64();
                    if tv != 0.0 {
                        total += tv * (lse - xr[j].to_f64());
                    }
                }
            }
        }
        let loss = T::from_f64(total / r as f64);
        let pa = self.clone();
        let pt = targets.clone();
        Tensor::make(1, 1, vec![loss], vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow()[0].to_f64();
                let x = pa.inner.data.borrow();
                let t = pt.inner.data.borrow();
                let scale = g / r as f64;
                pa.inner.with_grad_mut(|dst| {
                    for row in 0..r {
                        let xr = &x[row * c..(row + 1) * c];
                        let mut m = f64::NEG_INFINITY;
                        for &v in xr {
                            m = m.max(v.to_f64());
                        }
                        let mut denom = 0.0f64;
                        for &v in xr {
                            denom += (v.to_f64() - m).exp();
                        }
                        for j in 0..c {
                            let p = (xr[j].to_f64() - m).exp() / denom;
                            let d = (p - t[row * c + j].to_f64()) * scale;
                            dst[row * c + j] = dst[row * c + j] + T::from_f64(d);
                        }
                    }
                });
            })
        })
    }

    /// Numerically stable binary cross-entropy on logits, averaged over all
    /// elements: `max(l,0) - l*t + ln(1 + exp(-|l|))`.
    pub fn bce_with_logits(&self, targets: &Tensor<T>) -> Tensor<T> {
        assert_same_shape("bce_with_logits", self, targets);
        let n = self.numel();
        let mut total = 0.0f64;
        {
            let x = self.inner.data.borrow();
            let t = targets.inner.data.borrow();
            for i in 0..n {
                let l = x[i].to_f64();
                let tv = t[i].to_f64();
                total += l.max(0.0) - l * tv + (-l.abs()).exp().ln_1p();
            }
        }
        let loss = T::from_f64(total / n as f64);
        let pa = self.clone();
        let pt = targets.clone();
        Tensor::make(1, 1, vec![loss], vec![self.clone()], move || {
            Box::new(move |node| {
                let g = node.grad.borrow()[0].to_f64() / n as f64;
                let x = pa.inner.data.borrow();
                let t = pt.inner.data.borrow();
                pa.inner.with_grad_mut(|dst| {
                    for i in 0..n {
                        let l = x[i].to_f64();
                        let sigma = 1.0 / (1.0 + (-l).exp());
                        let d = (sigma - t[i].to_f64()) * g;
                        dst[i] = dst[i] + T::from_f64(d);
                    }
                });
            })
        })
    }
}
