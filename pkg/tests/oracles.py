"""Independent reference implementations used as test oracles.

Nothing here calls the library's counting, enumeration or trimming code;
membership is decided by direct simulation over the raw transition maps.
"""

import itertools
import random
from collections import deque

from ctrlimprov.automata import Alphabet, Dfa, Nfa


def all_words(alphabet, max_len):
    for n in range(max_len + 1):
        for w in itertools.product(list(alphabet), repeat=n):
            yield w


def dfa_accepts(d, word):
    q = d.initial
    for s in word:
        q = d.delta.get((q, s))
        if q is None:
            return False
    return q in d.accepting


def nfa_accepts(n, word):
    """On-the-fly subset simulation with explicit epsilon closure."""

    def close(states):
        stack, seen = list(states), set(states)
        while stack:
            q = stack.pop()
            for r in n.eps.get(q, ()):
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        return seen

    cur = close(n.initial_set)
    for s in word:
        cur = close({r for q in cur for r in n.delta.get((q, s), ())})
    return bool(cur & set(n.accepting))


def accepts(a, word):
    return dfa_accepts(a, word) if isinstance(a, Dfa) else nfa_accepts(a, word)


def brute_language(a, max_len):
    return {w for w in all_words(a.alphabet, max_len) if accepts(a, w)}


def random_dfa(rng, max_states=6, alphabet=("0", "1"), density=0.7, acc_prob=0.4):
    n = rng.randint(1, max_states)
    alpha = Alphabet(alphabet)
    delta = {}
    for q in range(n):
        for s in alpha:
            if rng.random() < density:
                delta[(q, s)] = rng.randrange(n)
    accepting = {q for q in range(n) if rng.random() < acc_prob}
    return Dfa(alpha, n, 0, accepting, delta)


def random_acyclic_dfa(rng, max_states=8, alphabet=("0", "1"), density=0.7):
    """Transitions only go from lower to higher state ids, so the language is finite."""
    n = rng.randint(1, max_states)
    alpha = Alphabet(alphabet)
    delta = {}
    for q in range(n - 1):
        for s in alpha:
            if rng.random() < density:
                delta[(q, s)] = rng.randrange(q + 1, n)
    accepting = {q for q in range(n) if rng.random() < 0.5}
    return Dfa(alpha, n, 0, accepting, delta)


def random_nfa(rng, max_states=5, alphabet=("0", "1"), eps_prob=0.15):
    n = rng.randint(1, max_states)
    alpha = Alphabet(alphabet)
    delta = {}
    for q in range(n):
        for s in alpha:
            targets = {r for r in range(n) if rng.random() < 0.3}
            if targets:
                delta[(q, s)] = frozenset(targets)
    eps = {}
    for q in range(n):
        targets = {r for r in range(n) if r != q and rng.random() < eps_prob}
        if targets:
            eps[q] = frozenset(targets)
    initial = {r for r in range(n) if rng.random() < 0.3} or {0}
    accepting = {q for q in range(n) if rng.random() < 0.4}
    return Nfa(alpha, n, initial, accepting, delta, eps)


def bfs_reachable(d):
    seen, queue = {d.initial}, deque([d.initial])
    while queue:
        q = queue.popleft()
        for (p, _), r in d.delta.items():
            if p == q and r not in seen:
                seen.add(r)
                queue.append(r)
    return seen


def shortest_pump_witness(d, max_len=4):
    """Least (x, y, z) by (|x|, x, |y|, y, |z|, z) with x y^i z accepted for i in 0..3.

    Brute force over all short words; the key orders symbols by alphabet index.
    """
    alpha = list(d.alphabet)
    idx = {s: i for i, s in enumerate(alpha)}

    def key(w):
        return len(w), [idx[s] for s in w]

    words = sorted(all_words(alpha, max_len), key=key)
    best = None
    for x in words:
        for y in words:
            if not y:
                continue
            for z in words:
                k = (key(x), key(y), key(z))
                if best is not None and k >= best[0]:
                    break
                if all(accepts(d, x + y * i + z) for i in range(4)):
                    # the state after x must equal the state after xy for a true loop
                    if isinstance(d, Dfa) and _dfa_run(d, x) != _dfa_run(d, x + y):
                        continue
                    best = (k, (x, y, z))
    return best[1] if best else None


def _dfa_run(d, word):
    q = d.initial
    for s in word:
        q = d.delta.get((q, s))
        if q is None:
            return None
    return q


def truth_table_models(formula, names):
    out = set()
    for bits in itertools.product([False, True], repeat=len(names)):
        if formula.evaluate(dict(zip(names, bits))):
            out.add(bits)
    return out


def longest_simple_accepting_path(d):
    """Exhaustive DFS over simple paths of the explicit graph."""
    best = -1

    def dfs(q, visited, length):
        nonlocal best
        if q in d.accepting:
            best = max(best, length)
        for (p, _), r in d.delta.items():
            if p == q and r not in visited:
                dfs(r, visited | {r}, length + 1)

    dfs(d.initial, {d.initial}, 0)
    return best


def seeded(seed):
    return random.Random(seed)


def trie_dfa(words, alphabet=("0", "1")):
    """Prefix-tree DFA accepting exactly ``words``."""
    delta, accepting, count = {}, set(), 1
    for w in words:
        q = 0
        for s in w:
            if (q, s) not in delta:
                delta[(q, s)] = count
                count += 1
            q = delta[(q, s)]
        accepting.add(q)
    return Dfa(Alphabet(alphabet), count, 0, accepting, delta)


def random_finite_language(rng, size, max_len=8, alphabet=("0", "1")):
    pool = set()
    while len(pool) < size:
        n = rng.randint(0, max_len)
        pool.add(tuple(rng.choice(alphabet) for _ in range(n)))
    return sorted(pool)


def free_block(bits, count=None, labelled=False):
    """Symbolic automaton whose words are single symbols with pattern value below ``count``.

    One state bit: start at 0, one step to 1, accept at 1. The bound is a
    little-endian comparator inside ``delta``; with ``labelled`` the valid
    patterns are instead listed in ``symbol_decode`` as labels ``s0, s1, ...``.
    """
    from ctrlimprov.sat import FALSE, and_, not_, or_, var
    from ctrlimprov.symbolic import SymbolicAutomaton

    x0, y0 = var("x0"), var("y0")
    step = and_(not_(x0), y0)
    decode = None
    if count is not None and labelled:
        decode = {format(v, f"0{bits}b")[::-1]: f"s{v}" for v in range(count)}
    elif count is not None and count < 2**bits:
        less = FALSE
        for i in range(bits):
            a = var(f"a{i}")
            less = or_(not_(a), less) if count >> i & 1 else and_(not_(a), less)
        step = and_(step, less)
    return SymbolicAutomaton(1, bits, not_(x0), x0, step, decode)
