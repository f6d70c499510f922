//! Fixed models and specs shared by the cross-check suites.

/// PEPA models with a system process; at most two visible labels.
pub const PEPA_MODELS: &[(&str, &str)] = &[
    ("prefix", "(a, 1).nil"),
    ("prefix_chain", "(a, 2).(b, 3).nil"),
    ("choice_same", "(a, 2).nil + (a, 3).nil"),
    ("choice_split", "(a, 1).nil + (b, 1/2).nil"),
    ("choice_dup", "(a, 1).nil + (a, 1).nil"),
    ("loop", "P = (a, 1).P; P"),
    ("two_state", "P = (a, 2).Q; Q = (b, 3).P; P"),
    ("sync_min", "(a, 2).nil <a> (a, 3).nil"),
    ("sync_split", "((a, 1).nil + (a, 3).nil) <a> (a, 2).nil"),
    ("sync_both_split", "((a, 1).nil + (a, 1).(b, 1).nil) <a> ((a, 2).nil + (a, 4).nil)"),
    ("interleave", "(a, 1).nil || (b, 2).nil"),
    ("interleave_same", "(a, 1).nil || (a, 2).nil"),
    ("coop_mixed", "(a, 1).(b, 2).nil <b> (b, 5).nil"),
    ("blocked", "(a, 1).nil <b> (b, 1).nil"),
    ("hide", "((a, 1).nil) \\ {a}"),
    ("hide_choice", "((a, 1).nil + (b, 2).nil) \\ {b}"),
    ("hide_all", "((a, 1).nil + (b, 2).nil) \\ {a, b}"),
    ("hide_coop", "((a, 2).nil <a> (a, 3).nil) \\ {a}"),
    ("client_server", "C = (a, 1).(b, 2).C; S = (a, 3).S; C <a> S"),
    ("pipeline", "P = (a, 1).(b, 1).P; Q = (b, 2).Q; P <b> Q"),
    ("repeated_sync", "P = (a, 1).P + (a, 1).P; Q = (a, 3).Q; P <a> Q"),
    ("hidden_loop", "P = (a, 1).(b, 1/3).P; P \\ {b}"),
    ("multiplicity", "(a, 1).nil + (a, 1).nil + (a, 1).nil"),
    ("nested_choice", "((a, 1).nil + (b, 1).nil) + ((a, 2).nil + (b, 1/2).nil)"),
];

/// Segala GSOS specs (format `segala`) with root terms.
pub const SEGALA_SPECS: &[(&str, &str, &[&str])] = &[
    (
        "point",
        "format segala
monoid rat
labels a
signature process { nil/0; go/1; }
rule go: => go(x) --a--> 1 * x
",
        &["go(nil)", "go(go(nil))"],
    ),
    (
        "coin",
        "format segala
monoid rat
labels a
signature process { nil/0; coin/0; h/0; t/0; }
rule flip: => coin --a--> 1/2 * h + 1/2 * t
",
        &["coin"],
    ),
    (
        "biased",
        "format segala
monoid rat
labels a, b
signature process { nil/0; coin/0; h/0; t/0; }
rule flip: => coin --a--> 1/3 * h + 2/3 * t
rule h: => h --b--> 1 * coin
",
        &["coin"],
    ),
    (
        "pair_copy",
        "format segala
monoid rat
labels a
signature process { u/0; v/0; flip/0; pair/2; dup/1; }
rule flip: => flip --a--> 1/2 * u + 1/2 * v
rule dup: x --a--> %p => dup(x) --a--> 1 * pair(%p, %p)
",
        &["dup(flip)"],
    ),
    (
        "par",
        "format segala
monoid rat
labels a, b
signature process { nil/0; coin/0; h/0; t/0; par/2; }
rule flip: => coin --a--> 1/2 * h + 1/2 * t
rule tick: => h --b--> 1 * nil
rule l: open(y), x --a--> %p => par(x, y) --a--> 1 * par(%p, y)
rule r: open(x), y --a--> %p, x -/a-> => par(x, y) --a--> 1 * par(x, %p)
rule lb: open(y), x --b--> %p => par(x, y) --b--> 1 * par(%p, y)
",
        &["par(coin, coin)", "par(h, coin)"],
    ),
    (
        "choice",
        "format segala
monoid rat
labels a
signature process { nil/0; coin/0; h/0; t/0; plus/2; }
rule flip: => coin --a--> 1/2 * h + 1/2 * t
rule l: open(y), x --a--> %p => plus(x, y) --a--> 1 * %p
rule r: open(x), y --a--> %p => plus(x, y) --a--> 1 * %p
",
        &["plus(coin, coin)", "plus(coin, nil)"],
    ),
    (
        "mix",
        "format segala
monoid rat
labels a
signature process { nil/0; coin/0; h/0; t/0; mix/2; }
rule flip: => coin --a--> 1/2 * h + 1/2 * t
rule mix: x --a--> %p, y --a--> %q => mix(x, y) --a--> 1/4 * %p + 3/4 * %q
",
        &["mix(coin, coin)", "mix(coin, nil)"],
    ),
    (
        "support",
        "format segala
monoid rat
labels a, b
signature process { nil/0; coin/0; h/0; t/0; watch/1; }
rule flip: => coin --a--> 1/2 * h + 1/2 * t
rule w: x --a--> %p, in(%p, y) => watch(x) --b--> 1 * watch(y)
",
        &["watch(coin)"],
    ),
    (
        "neg",
        "format segala
monoid rat
labels a, b
signature process { nil/0; coin/0; h/0; t/0; guard/1; }
rule flip: => coin --a--> 1/2 * h + 1/2 * t
rule tick: => t --b--> 1 * nil
rule g: open(x), x -/b-> => guard(x) --b--> 1 * x
rule ga: x --a--> %p => guard(x) --a--> 1 * guard(%p)
",
        &["guard(coin)", "guard(t)"],
    ),
    (
        "seq",
        "format segala
monoid rat
labels a
signature process { nil/0; coin/0; h/0; t/0; seq/2; }
rule flip: => coin --a--> 1/2 * h + 1/2 * t
rule s1: open(y), x --a--> %p => seq(x, y) --a--> 1 * seq(%p, y)
rule s2: open(y), x -/a-> => seq(x, y) --a--> 1/2 * y + 1/2 * nil
",
        &["seq(coin, coin)"],
    ),
    (
        "triple",
        "format segala
monoid rat
labels a
signature process { u/0; v/0; flip/0; tri/3; tr/1; }
rule flip: => flip --a--> 1/2 * u + 1/2 * v
rule tr: x --a--> %p => tr(x) --a--> 1/2 * tri(%p, %p, x) + 1/2 * tri(%p, x, x)
",
        &["tr(flip)"],
    ),
];

/// W-GSOS specs (format `wgsos`) with root terms.
pub const WGSOS_SPECS: &[(&str, &str, &[&str])] = &[
    (
        "prefix",
        "format wgsos
monoid rat
labels a
signature process { nil/0; pre/1 {weight}; }
rule pre: => pre{?r}(x) --a--> x @ prod{?r}()
",
        &["pre{2}(nil)", "pre{1/2}(pre{3}(nil))"],
    ),
    (
        "choice",
        "format wgsos
monoid rat
labels a, b
signature process { nil/0; pre/1 {label, weight}; plus/2; }
rule pre: open(x) => pre{?l,?r}(x) --?l--> x @ prod{?r}()
rule l: open(x), open(y), x =?c=> ?w, x --?c,u--> z => plus(x, y) --?c--> z @ prod{1}(u)
rule r: open(x), open(y), y =?c=> ?w, y --?c,u--> z => plus(x, y) --?c--> z @ prod{1}(u)
",
        &["plus(pre{a,1}(nil), pre{a,2}(nil))", "plus(pre{a,1}(nil), pre{b,3}(nil))"],
    ),
    (
        "merge",
        "format wgsos
monoid rat
labels a
signature process { nil/0; one/0; twice/1; }
rule one: => one --a--> nil @ prod{1}()
rule t1: x =a=> ?w, x --a,u--> y => twice(x) --a--> y @ prod{1}(u)
rule t2: x =a=> ?w, x --a,u--> y => twice(x) --a--> y @ id(u)
beta id(u) = u
",
        &["twice(one)", "twice(twice(one))"],
    ),
    (
        "product",
        "format wgsos
monoid rat
labels a
signature process { nil/0; pre/1 {weight}; sync/2; }
rule pre: open(x) => pre{?r}(x) --a--> x @ prod{?r}()
rule s: x =a=> ?v, y =a=> ?w, x --a,u--> x', y --a,v--> y' => sync(x, y) --a--> sync(x', y') @ prod{1}(u, v)
",
        &["sync(pre{2}(nil), pre{3}(nil))", "sync(sync(pre{1}(nil), pre{2}(nil)), pre{1/2}(nil))"],
    ),
    (
        "scale",
        "format wgsos
monoid nat
labels a, b
signature process { nil/0; pre/1 {label, weight}; dbl/1; }
rule pre: open(x) => pre{?l,?r}(x) --?l--> x @ prod{?r}()
rule d: open(x), x =?c=> ?w, x --?c,u--> y => dbl(x) --?c--> dbl(y) @ prod{2}(u)
",
        &["dbl(pre{a,1}(pre{b,3}(nil)))"],
    ),
    (
        "bool",
        "format wgsos
monoid bool
labels a
signature process { nil/0; go/0; both/2; }
rule go: => go --a--> nil @ prod{tt}()
rule b: x =a=> ?v, y =a=> ?w, x --a,u--> x', y --a,v--> y' => both(x, y) --a--> both(x', y') @ prod{tt}(u, v)
",
        &["both(go, go)"],
    ),
    (
        "guarded",
        "format wgsos
monoid rat
labels a, b
signature process { nil/0; pre/1 {label, weight}; only/1; }
rule pre: open(x) => pre{?l,?r}(x) --?l--> x @ prod{?r}()
rule o: x =a=> 2, x --a,u--> y => only(x) --b--> y @ prod{3}(u)
",
        &["only(pre{a,2}(nil))", "only(pre{a,1}(nil))", "only(pre{b,2}(nil))"],
    ),
    (
        "copy",
        "format wgsos
monoid rat
labels a
signature process { nil/0; pre/1 {weight}; pair/2; cp/1; }
rule pre: open(x) => pre{?r}(x) --a--> x @ prod{?r}()
rule c: x =a=> ?w, x --a,u--> y => cp(x) --a--> pair(y, x) @ prod{1/2}(u)
",
        &["cp(pre{2}(pre{3}(nil)))"],
    ),
    (
        "named_beta",
        "format wgsos
monoid rat
labels a
signature process { nil/0; pre/1 {weight}; mul/2; }
beta twice(u, v) = 2 * u * v
rule pre: open(x) => pre{?r}(x) --a--> x @ prod{?r}()
rule m: x =a=> ?v, y =a=> ?w, x --a,u--> x', y --a,v--> y' => mul(x, y) --a--> mul(x', y') @ twice(u, v)
",
        &["mul(pre{2}(nil), pre{1/3}(nil))"],
    ),
    (
        "async",
        "format wgsos
monoid rat
labels a, b
signature process { nil/0; pre/1 {label, weight}; par/2; }
rule pre: open(x) => pre{?l,?r}(x) --?l--> x @ prod{?r}()
rule l: open(x), open(y), x =?c=> ?w, x --?c,u--> z => par(x, y) --?c--> par(z, y) @ prod{1}(u)
rule r: open(x), open(y), y =?c=> ?w, y --?c,u--> z => par(x, y) --?c--> par(x, z) @ prod{1}(u)
",
        &["par(pre{a,1}(nil), pre{a,1}(nil))", "par(pre{a,1}(pre{b,2}(nil)), pre{b,1}(nil))"],
    ),
];
