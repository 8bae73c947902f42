//! Scalar recursions for `α_j`, `β_j`, `γ_j`, written out as nested sums.

use crate::rational::Rational;

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p, d)
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// `(alpha, beta, gamma)` with `degree + 1` entries each, for a built-in fractal name.
pub fn explicit_recursions(name: &str, degree: usize) -> Option<[Vec<Rational>; 3]> {
    match name {
        "sg" => Some(sg(degree)),
        "sg3" => Some(sg3(degree)),
        "hg" => Some(hg(degree)),
        "sg4" => Some(sg4(degree)),
        _ => None,
    }
}

fn alpha_start(a1: Rational, degree: usize) -> Vec<Rational> {
    let mut a = vec![int(1), a1];
    a.truncate(degree + 1);
    a
}

fn sg(degree: usize) -> [Vec<Rational>; 3] {
    let mut a = alpha_start(q(1, 6), degree);
    for j in 2..=degree {
        let s: Rational = (1..j).map(|i| &a[j - i] * &a[i]).sum();
        let d = int(5).pow(j as i32) - int(5);
        a.push(int(4) * s / d);
    }
    let mut b = vec![q(-1, 2)];
    for j in 1..=degree {
        let mut s = Rational::zero();
        for i in 0..j {
            let ab = &a[j - i] * &b[i];
            s += q(2, 5) * int(5).pow((j - i) as i32) * &ab;
            s -= q(2, 3) * int(5).pow(i as i32) * &ab;
            s += q(4, 5) * &ab;
        }
        b.push(s / (int(5).pow(j as i32) - int(1)));
    }
    let mut g = vec![q(1, 2)];
    for j in 1..=degree {
        let s: Rational = (0..j).map(|i| &a[j - i] * &g[i]).sum();
        g.push(int(4) * s / (int(5).pow(j as i32 + 1) - int(5)));
    }
    [a, b, g]
}

fn sg3(degree: usize) -> [Vec<Rational>; 3] {
    let t = q(90, 7);
    let mut a = alpha_start(q(1, 6), degree);
    for j in 2..=degree {
        let mut s4 = Rational::zero();
        for i1 in 1..j {
            for i2 in 0..=j - i1 {
                let inner: Rational = (0..=j - i1 - i2)
                    .map(|i3| &a[i3] * &a[j - i1 - i2 - i3])
                    .sum();
                s4 += &a[i1] * &a[i2] * inner;
            }
        }
        let mut s2 = Rational::zero();
        for i in 1..j {
            s2 += (int(1) + t.pow((j - i) as i32)) * &a[i] * &a[j - i];
        }
        let d = int(7) * t.pow(j as i32) - int(90);
        a.push((int(96) * s4 - int(6) * s2) / d);
    }
    let mut b = vec![q(-1, 2)];
    for j in 1..=degree {
        let mut s = Rational::zero();
        for i1 in 1..=j {
            for i2 in 0..=j - i1 {
                let a12 = &a[i1] * &a[i2];
                let mut inner = Rational::zero();
                for i3 in 0..=j - i1 - i2 {
                    let rest = j - i1 - i2 - i3;
                    let s5: Rational = (0..=rest).map(|i4| &a[i4] * &b[rest - i4]).sum();
                    inner += &a[i3] * (int(64) * s5 + int(32) * &b[rest]);
                }
                s += &a12 * inner;
                s += (int(12) - q(60, 7) * t.pow((j - i1 - i2) as i32)) * &a12 * &b[j - i1 - i2];
            }
            s += (int(14) - q(100, 7) * t.pow((j - i1) as i32)) * &a[i1] * &b[j - i1];
        }
        b.push(s / int(15) / (t.pow(j as i32) - int(1)));
    }
    let mut g = vec![q(1, 2)];
    for j in 1..=degree {
        let mut s = Rational::zero();
        for i1 in 1..=j {
            for i2 in 0..=j - i1 {
                s += &a[i1] * &a[i2] * &g[j - i1 - i2];
            }
            s += &a[i1] * &g[j - i1];
        }
        g.push(q(16, 15) * s / (t.pow(j as i32) - int(1)));
    }
    [a, b, g]
}

fn hg(degree: usize) -> [Vec<Rational>; 3] {
    let t = int(14);
    let mut a = alpha_start(q(1, 6), degree);
    for j in 2..=degree {
        let mut s4 = Rational::zero();
        let mut s3 = Rational::zero();
        for i1 in 1..j {
            for i2 in 0..=j - i1 {
                let a12 = &a[i1] * &a[i2];
                s3 += &a12 * &a[j - i1 - i2];
                let inner: Rational = (0..=j - i1 - i2)
                    .map(|i3| &a[i3] * &a[j - i1 - i2 - i3])
                    .sum();
                s4 += a12 * inner;
            }
        }
        let mut s2 = Rational::zero();
        for i in 1..j {
            s2 += (int(1) + t.pow((j - i) as i32)) * &a[i] * &a[j - i];
        }
        let d = t.pow(j as i32) - int(14);
        a.push((int(32) * s4 - int(16) * s3 - int(2) * s2) / d);
    }
    let mut b = vec![q(-1, 2)];
    for j in 1..=degree {
        let mut s = Rational::zero();
        for i1 in 1..=j {
            for i2 in 0..=j - i1 {
                let a12 = &a[i1] * &a[i2];
                let mut inner = Rational::zero();
                for i3 in 0..=j - i1 - i2 {
                    let rest = j - i1 - i2 - i3;
                    let s5: Rational = (0..=rest).map(|i4| &a[i4] * &b[rest - i4]).sum();
                    inner += &a[i3] * s5;
                }
                s += q(64, 7) * &a12 * inner;
                s -= (q(4, 7) + q(4, 3) * t.pow((j - i1 - i2) as i32)) * &a12 * &b[j - i1 - i2];
            }
            s += (q(6, 7) - q(4, 3) * t.pow((j - i1) as i32)) * &a[i1] * &b[j - i1];
        }
        b.push(s / (t.pow(j as i32) - int(1)));
    }
    let mut g = vec![q(1, 2)];
    for j in 1..=degree {
        let mut s = Rational::zero();
        for i1 in 1..=j {
            for i2 in 0..=j - i1 {
                s += q(16, 7) * &a[i1] * &a[i2] * &g[j - i1 - i2];
            }
            s += q(8, 7) * &a[i1] * &g[j - i1];
        }
        g.push(s / (t.pow(j as i32) - int(1)));
    }
    [a, b, g]
}

fn sg4(degree: usize) -> [Vec<Rational>; 3] {
    let t = int(6);
    let mut a = alpha_start(q(1, 12), degree);
    for j in 2..=degree {
        let s: Rational = (1..j).map(|i| &a[i] * &a[j - i]).sum();
        a.push(s / (t.pow(j as i32 - 1) - int(1)));
    }
    let mut b = vec![q(-1, 3)];
    for j in 1..=degree {
        let mut s = Rational::zero();
        for i1 in 1..=j {
            for i2 in 0..=j - i1 {
                s += int(3) * &a[i1] * &a[i2] * &b[j - i1 - i2];
            }
            s += (int(1) - q(3, 4) * t.pow((j - i1) as i32)) * &a[i1] * &b[j - i1];
        }
        b.push(s / (t.pow(j as i32) - int(1)));
    }
    let mut g = vec![q(1, 3)];
    for j in 1..=degree {
        let s: Rational = (1..=j).map(|i| &a[i] * &g[j - i]).sum();
        g.push(s / (t.pow(j as i32) - int(1)));
    }
    [a, b, g]
}
