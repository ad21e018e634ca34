"""Pure-Python formula evaluator with the same interface as the compiled one.

The flat program is turned into nested closures once, which is several
times faster than interpreting the arrays node by node.
"""
from __future__ import annotations

import numpy as np

from .logic.compiler import (F_ALL, F_AND, F_EQ, F_EX, F_IFF, F_IMP, F_NOT, F_OR, F_REL,
                             F_TRUE, T_CONST, T_VAR)

BACKEND = "python"


class Kernel:
    def __init__(self, program):
        self.program = program
        self.n = program.n
        self.env = [0] * program.nslots
        self._ftab = program.ftab.tolist()
        self._rtab = program.rtab.tolist()
        self._memos: list[bytearray] = [bytearray(b"\x02") * (self.n ** int(k))
                                        for k in program.m_count.tolist()]
        self._root = self._formula(program.root)

    def reset_memo(self):
        for memo in self._memos:
            memo[:] = b"\x02" * len(memo)

    # -------------------------------------------------------------- terms
    def _term(self, t: int):
        p = self.program
        env, n, ftab = self.env, self.n, self._ftab
        op = int(p.t_op[t])
        if op == T_VAR:
            slot = int(p.t_arg[t])
            return lambda: env[slot]
        if op == T_CONST:
            value = int(p.t_arg[t])
            return lambda: value
        first, cnt = int(p.t_first[t]), int(p.t_count[t])
        off = int(p.f_off[int(p.t_arg[t])])
        kids = [self._term(int(k)) for k in p.t_kids[first:first + cnt]]
        if cnt == 1:
            (x,) = kids
            return lambda: ftab[off + x()]
        if cnt == 2:
            x, y = kids
            return lambda: ftab[off + x() * n + y()]

        def app():
            idx = 0
            for k in kids:
                idx = idx * n + k()
            return ftab[off + idx]
        return app

    # ------------------------------------------------------------ formulas
    def _formula(self, node: int):
        p = self.program
        env, n = self.env, self.n
        op = int(p.op[node])
        if op == F_EQ:
            x, y = self._term(int(p.a[node])), self._term(int(p.b[node]))
            return lambda: x() == y()
        if op == F_REL:
            first, cnt = int(p.c[node]), int(p.d[node])
            off = int(p.r_off[int(p.a[node])])
            kids = [self._term(int(k)) for k in p.f_kids[first:first + cnt]]
            rtab = self._rtab

            def rel():
                idx = 0
                for k in kids:
                    idx = idx * n + k()
                return rtab[off + idx] == 1
            return rel
        if op == F_NOT:
            x = self._formula(int(p.a[node]))
            return lambda: not x()
        if op in (F_AND, F_OR, F_IMP, F_IFF):
            x, y = self._formula(int(p.a[node])), self._formula(int(p.b[node]))
            if op == F_AND:
                return lambda: x() and y()
            if op == F_OR:
                return lambda: x() or y()
            if op == F_IMP:
                return lambda: (not x()) or y()
            return lambda: x() == y()
        if op in (F_EX, F_ALL):
            return self._quantifier(node, op == F_EX)
        return (lambda: True) if op == F_TRUE else (lambda: False)

    def _quantifier(self, node: int, is_exists: bool):
        p = self.program
        env, n = self.env, self.n
        slot = int(p.a[node])
        body = self._formula(int(p.b[node]))
        values = range(n)
        mid = int(p.c[node])

        if is_exists:
            def scan():
                saved = env[slot]
                res = False
                for v in values:
                    env[slot] = v
                    if body():
                        res = True
                        break
                env[slot] = saved
                return res
        else:
            def scan():
                saved = env[slot]
                res = True
                for v in values:
                    env[slot] = v
                    if not body():
                        res = False
                        break
                env[slot] = saved
                return res

        if mid < 0:
            return scan
        memo = self._memos[mid]
        first, cnt = int(p.m_first[mid]), int(p.m_count[mid])
        keys = [int(s) for s in p.m_slots[first:first + cnt]]

        if cnt == 0:
            def key():
                return 0
        elif cnt == 1:
            (s0,) = keys

            def key():
                return env[s0]
        elif cnt == 2:
            s0, s1 = keys

            def key():
                return env[s0] * n + env[s1]
        else:
            def key():
                k = 0
                for s in keys:
                    k = k * n + env[s]
                return k

        def cached():
            k = key()
            hit = memo[k]
            if hit != 2:
                return hit == 1
            res = scan()
            memo[k] = 1 if res else 0
            return res
        return cached

    # ---------------------------------------------------------------- api
    def evaluate(self, values) -> bool:
        for j, v in enumerate(values):
            self.env[j] = int(v)
        return bool(self._root())

    def grid(self, k: int) -> np.ndarray:
        n, env, root = self.n, self.env, self._root
        total = n ** k
        out = bytearray(total)
        for j in range(k):
            env[j] = 0
        for i in range(total):
            out[i] = 1 if root() else 0
            j = k - 1
            while j >= 0:
                env[j] += 1
                if env[j] < n:
                    break
                env[j] = 0
                j -= 1
        return np.frombuffer(bytes(out), dtype=np.uint8).copy()

    def rows(self, assignments) -> np.ndarray:
        env, root = self.env, self._root
        data = np.asarray(assignments).tolist()
        out = bytearray(len(data))
        for i, row in enumerate(data):
            for j, v in enumerate(row):
                env[j] = v
            out[i] = 1 if root() else 0
        return np.frombuffer(bytes(out), dtype=np.uint8).copy()
