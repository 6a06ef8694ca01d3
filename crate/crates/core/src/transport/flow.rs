//! Exact transportation problem on a complete bipartite network.
//!
//! Successive shortest augmenting paths with Johnson potentials. Supplies
//! and demands are integers and are never expanded into unit masses, so the
//! network has one node per distinct atom.

/// Optimal plan: total cost and the non-zero flows `(source, sink, amount)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportPlan {
    pub cost: f64,
    pub flows: Vec<(usize, usize, i64)>,
}

/// Solves min Σ cost(i,j)·x_ij subject to row sums `supplies` and column
/// sums `demands`. Both must be positive with equal totals.
pub fn solve_transport(
    supplies: &[i64],
    demands: &[i64],
    cost: impl Fn(usize, usize) -> f64,
) -> TransportPlan {
    let s_count = supplies.len();
    let t_count = demands.len();
    debug_assert_eq!(
        supplies.iter().sum::<i64>(),
        demands.iter().sum::<i64>(),
        "unbalanced transport problem"
    );
    if s_count == 0 || t_count == 0 {
        return TransportPlan {
            cost: 0.0,
            flows: Vec::new(),
        };
    }
    let c: Vec<f64> = (0..s_count)
        .flat_map(|i| (0..t_count).map(move |j| (i, j)))
        .map(|(i, j)| cost(i, j))
        .collect();

    // node ids: sources 0..S, sinks S..S+T, super source S+T, super sink S+T+1
    let v_count = s_count + t_count + 2;
    let src = s_count + t_count;
    let snk = src + 1;
    let mut supply_left = supplies.to_vec();
    let mut demand_left = demands.to_vec();
    let mut flow = vec![0i64; s_count * t_count];
    let mut potential = vec![0.0f64; v_count];
    let mut remaining: i64 = supplies.iter().sum();

    let mut dist = vec![f64::INFINITY; v_count];
    let mut prev = vec![usize::MAX; v_count];
    let mut done = vec![false; v_count];

    while remaining > 0 {
        dist.fill(f64::INFINITY);
        prev.fill(usize::MAX);
        done.fill(false);
        dist[src] = 0.0;
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for (v, (&d, &fin)) in dist.iter().zip(&done).enumerate() {
                if !fin && d < best {
                    best = d;
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u == snk {
                continue;
            }
            let du = dist[u];
            let relax = |v: usize, w: f64, dist: &mut [f64], prev: &mut [usize]| {
                let reduced = (w + potential[u] - potential[v]).max(0.0);
                if du + reduced < dist[v] {
                    dist[v] = du + reduced;
                    prev[v] = u;
                }
            };
            if u == src {
                for i in 0..s_count {
                    if supply_left[i] > 0 {
                        relax(i, 0.0, &mut dist, &mut prev);
                    }
                }
            } else if u < s_count {
                let row = &c[u * t_count..(u + 1) * t_count];
                for (j, &cij) in row.iter().enumerate() {
                    if !done[s_count + j] {
                        relax(s_count + j, cij, &mut dist, &mut prev);
                    }
                }
            } else {
                let j = u - s_count;
                for i in 0..s_count {
                    if !done[i] && flow[i * t_count + j] > 0 {
                        relax(i, -c[i * t_count + j], &mut dist, &mut prev);
                    }
                }
                if demand_left[j] > 0 {
                    relax(snk, 0.0, &mut dist, &mut prev);
                }
            }
        }
        let reach = dist[snk];
        assert!(reach.is_finite(), "transport network is infeasible");
        for (p, &d) in potential.iter_mut().zip(&dist) {
            *p += d.min(reach);
        }

        // walk back from the sink: snk <- sink <- source (<- sink <- source)* <- src
        let mut path = Vec::new();
        let mut v = snk;
        while v != src {
            path.push(v);
            v = prev[v];
        }
        path.push(src);
        path.reverse();
        let first_source = path[1];
        let last_sink = path[path.len() - 2] - s_count;
        let mut amount = supply_left[first_source].min(demand_left[last_sink]);
        for w in path[1..path.len() - 1].windows(2) {
            let (a, b) = (w[0], w[1]);
            if a >= s_count {
                // backward edge sink a -> source b
                amount = amount.min(flow[b * t_count + (a - s_count)]);
            }
        }
        debug_assert!(amount > 0);
        for w in path[1..path.len() - 1].windows(2) {
            let (a, b) = (w[0], w[1]);
            if a < s_count {
                flow[a * t_count + (b - s_count)] += amount;
            } else {
                flow[b * t_count + (a - s_count)] -= amount;
            }
        }
        supply_left[first_source] -= amount;
        demand_left[last_sink] -= amount;
        remaining -= amount;
    }

    let mut total = 0.0;
    let mut flows = Vec::new();
    for i in 0..s_count {
        for j in 0..t_count {
            let f = flow[i * t_count + j];
            if f > 0 {
                total += f as f64 * c[i * t_count + j];
                flows.push((i, j, f));
            }
        }
    }
    TransportPlan { cost: total, flows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_is_uncrossed() {
        // sources at 0 and 10, sinks at 9 and 1 on a line
        let xs = [0.0f64, 10.0];
        let ys = [9.0, 1.0];
        let plan_abs = solve_transport(&[1, 1], &[1, 1], |i, j| (xs[i] - ys[j]).abs());
        assert_eq!(plan_abs.cost, 2.0);
        assert_eq!(plan_abs.flows, vec![(0, 1, 1), (1, 0, 1)]);
    }

    #[test]
    fn integer_supplies_split() {
        let plan = solve_transport(&[3], &[1, 2], |_, j| [1.0, 2.0][j]);
        assert_eq!(plan.cost, 5.0);
        assert_eq!(plan.flows, vec![(0, 0, 1), (0, 1, 2)]);
    }

    #[test]
    fn rerouting_through_backward_edges() {
        // Greedy would send source 0 to sink 0 first; the optimum needs the
        // flow rerouted.
        let cost = [[1.0, 2.0], [1.0, 100.0]];
        let plan = solve_transport(&[1, 1], &[1, 1], |i, j| cost[i][j]);
        assert_eq!(plan.cost, 3.0);
    }
}
