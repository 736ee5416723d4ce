use inflap::builtin::dumbbell_arc;
use inflap::graph::GraphPoint;
use inflap::num::{Rat, Scalar};
use inflap::solver::*;

fn main() {
    let g = dumbbell_arc();
    let cfg = SolveConfig { h: Rat::new(1, 64), tol: 1e-12, max_iters: 400_000, sandwich: true };
    let r = solve_ground_state(&g, None, &ConstraintSpec::FullRidge, &cfg).unwrap();
    println!("FULL: iters={} gap={:?} monodef={:?} resid={:.3e}",
        r.iterations, r.sandwich_gap, r.monotone_defect, r.residual_sup);
    // where is the gap? recompute both passes manually comparing probes
    let o = GraphPoint::vertex(g.find_vertex("O").unwrap());
    let v1 = GraphPoint::vertex(g.find_vertex("V+1").unwrap());
    println!("u(O)={:.9} u(V+1)={:.9}", r.u.value_at(&o).unwrap(), r.u.value_at(&v1).unwrap());

    let lam = Rat::new(3, 5);
    let r2 = solve_ground_state(&g, Some(&lam), &ConstraintSpec::FullRidge, &cfg).unwrap();
    let ep3 = g.find_edge("e+3").unwrap();
    let pp = g.point(ep3, Rat::int(1)).unwrap();
    println!("SUPER: incenter pass={} witnesses={}", r2.incenter.pass, r2.incenter.witnesses.len());
    println!("u(P+)={}", r2.u.value_at(&pp).unwrap());
    // peak neighbors
    let i = r2.u.disc.find_node(&pp).unwrap();
    for (j, gp) in &r2.u.disc.adj[i] {
        println!("  nbr {} gap {} val {:.9} sub={:.6}", j, gp.to_f64(), r2.u.values[*j as usize],
           (r2.u.values[i] - r2.u.values[*j as usize])/gp.to_f64());
    }
    println!("lambda_exact={} bound={:.6}", r2.lambda_exact, 0.5*1.0 + 2.0/64.0);
}
