"""Quick check of the dpoc extension module.

Build it with `maturin develop -m crates/python/Cargo.toml`, or copy
target/*/libdpoc_py.so next to this file as dpoc.so.
"""

import dpoc


def main():
    rules, graphs = dpoc.formose()
    by_name = {r.name: r for r in rules}
    g = dict(graphs)
    print(rules)
    print(g["g0"], g["g1"])

    formaldehyde = dpoc.MolGraph(["C", "O", "H", "H"], [(0, 1, "="), (0, 2, "-"), (0, 3, "-")])
    assert formaldehyde.is_isomorphic(g["g0"])
    assert formaldehyde.canonical_hash() == g["g0"].canonical_hash()
    assert dpoc.MolGraph.from_gml(formaldehyde.to_gml()).is_isomorphic(formaldehyde)

    products = dpoc.apply(by_name["p0"], [g["g1"]], proper_only=True)
    assert products, "keto-enol step found no match"
    print("p0 on g1:", products[0])

    composites = dpoc.compose_all(by_name["p3"], by_name["p1"])
    assert len(composites) == 1
    p = composites[0]
    assert dpoc.Rule.from_gml(p.to_gml()).canonical_hash() == p.canonical_hash()
    assert p.inverse("x").inverse("y").canonical_hash() == p.canonical_hash()
    print("p1 after p3:", p)

    bound = dpoc.bind(g["g1"], by_name["p0"])
    assert bound
    print("universe up to 4:", dpoc.universe_count(rules, [g["g0"], g["g1"]], 4))

    try:
        dpoc.MolGraph.from_gml("graph [ node [ id 0 label \"C\" ] node [ id 0 label \"O\" ] ]")
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("duplicate id accepted")
    print("ok")


if __name__ == "__main__":
    main()
