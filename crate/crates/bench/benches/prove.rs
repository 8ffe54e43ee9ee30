use std::hint::black_box;

use criterion::{Criterion, criterion_group, criterion_main};
use termtpl_core::{parse_strategy, parse_trs, prove};

const ADDITION: &str = "(VAR x y)(RULES +(0,y) -> y +(s(x),y) -> s(+(x,y)))";
const NESTED: &str = "(VAR x y)(RULES g(f(x),y) -> f(g(x,y)) h(f(x),y) -> f(h(x,y)))";

fn bench_prove(c: &mut Criterion) {
    let cases = [
        ("lpo/addition", ADDITION, "lpo"),
        ("kbo/addition", ADDITION, "kbo"),
        (
            "kbo-fixed/addition",
            ADDITION,
            r#"kbo -prec "+ > s > 0" -w0 1 -weights "+ = s = 0 = 1""#,
        ),
        ("poly/addition", ADDITION, "poly"),
        ("matrix2/addition", ADDITION, "matrix -dim 2"),
        (
            "matrix3-triangular/nested",
            NESTED,
            r#"matrix -inters "f = g = h = [1,_,_;0,1,_;0,0,1]x0 + _, g = h = [1,_,_;0,1,_;0,0,1]x1 + _""#,
        ),
    ];
    let mut group = c.benchmark_group("prove");
    group.sample_size(20);
    for (name, problem, strategy) in cases {
        let trs = parse_trs(problem).unwrap();
        let strategy = parse_strategy(strategy).unwrap();
        let (cfg, tmpl) = strategy.compile(&trs).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| prove(black_box(&trs), strategy.method, &cfg, tmpl.as_ref()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_prove);
criterion_main!(benches);
