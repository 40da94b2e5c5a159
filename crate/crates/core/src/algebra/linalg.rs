use super::cyclotomic::CycElement;

/// Basis of the right nullspace of a dense matrix over Q(ζ_m), by exact
/// reduction to row echelon form. All entries must share one order `m`.
pub fn nullspace(mut rows: Vec<Vec<CycElement>>, ncols: usize, m: u32) -> Vec<Vec<CycElement>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inv().expect("pivot is nonzero");
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..ncols {
                    if !rows[r][j].is_zero() {
                        let t = &f * &rows[r][j];
                        rows[i][j] = &rows[i][j] - &t;
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![CycElement::zero(m); ncols];
            v[f] = CycElement::one(m);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -&rows[i][f];
            }
            v
        })
        .collect()
}
