// Free-group words as signed generator indices, and D-word values.

use forge::equalizer::{DGen, Equalizer};

pub fn reduce(w: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn inv(w: &[i32]) -> Vec<i32> {
    w.iter().rev().map(|x| -x).collect()
}

// Value of a D-word computed from the definition of D.
pub fn value(eq: &Equalizer, w: &[(DGen, i8)]) -> (Vec<i32>, Vec<i32>) {
    let (mut u, mut v) = (Vec::new(), Vec::new());
    for &(d, s) in w {
        let (a, b) = match d {
            DGen::Rel(i) => (eq.relators[i].clone(), vec![]),
            DGen::Diag(x) => (vec![x as i32 + 1], vec![-(x as i32 + 1)]),
        };
        let (a, b) = if s > 0 { (a, b) } else { (inv(&a), inv(&b)) };
        u = reduce(&[u, a].concat());
        v = reduce(&[v, b].concat());
    }
    (u, v)
}

// Twice the signed area enclosed by a closed path in Z^2, x = 1 and y = 2.
pub fn shoelace(w: &[i32]) -> i64 {
    let (mut x, mut y, mut twice) = (0i64, 0i64, 0i64);
    for &g in w {
        let (dx, dy) = match g {
            1 => (1, 0),
            -1 => (-1, 0),
            2 => (0, 1),
            _ => (0, -1),
        };
        twice += x * (y + dy) - (x + dx) * y;
        x += dx;
        y += dy;
    }
    twice
}

