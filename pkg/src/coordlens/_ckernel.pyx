# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled formula evaluator over a flattened program.

Quantifier nodes memoize their value keyed by the values of their free
variables; connectives and quantifiers short-circuit.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int8_t, int32_t, int64_t, uint8_t

cnp.import_array()

cdef enum:
    T_VAR = 0
    T_CONST = 1
    F_EQ = 0
    F_REL = 1
    F_NOT = 2
    F_AND = 3
    F_OR = 4
    F_IMP = 5
    F_IFF = 6
    F_EX = 7
    F_ALL = 8
    F_TRUE = 9

BACKEND = "cython"


cdef class Kernel:
    cdef int n
    cdef int root
    cdef int32_t[::1] t_op, t_arg, t_first, t_count, t_kids
    cdef int32_t[::1] ftab
    cdef int64_t[::1] f_off, r_off, m_off
    cdef uint8_t[::1] rtab
    cdef int32_t[::1] op, a, b, c, d, f_kids
    cdef int32_t[::1] m_first, m_count, m_slots
    cdef int8_t[::1] memo
    cdef int32_t[::1] env
    cdef public object program

    def __init__(self, program):
        self.program = program
        self.n = program.n
        self.root = program.root
        self.t_op = program.t_op
        self.t_arg = program.t_arg
        self.t_first = program.t_first
        self.t_count = program.t_count
        self.t_kids = program.t_kids if program.t_kids.size else np.zeros(1, np.int32)
        self.ftab = program.ftab if program.ftab.size else np.zeros(1, np.int32)
        self.f_off = program.f_off if program.f_off.size else np.zeros(1, np.int64)
        self.rtab = program.rtab if program.rtab.size else np.zeros(1, np.uint8)
        self.r_off = program.r_off if program.r_off.size else np.zeros(1, np.int64)
        self.op = program.op
        self.a = program.a
        self.b = program.b
        self.c = program.c
        self.d = program.d
        self.f_kids = program.f_kids if program.f_kids.size else np.zeros(1, np.int32)
        self.m_first = program.m_first if program.m_first.size else np.zeros(1, np.int32)
        self.m_count = program.m_count if program.m_count.size else np.zeros(1, np.int32)
        self.m_off = program.m_off if program.m_off.size else np.zeros(1, np.int64)
        self.m_slots = program.m_slots if program.m_slots.size else np.zeros(1, np.int32)
        self.memo = np.full(max(1, program.memo_size), -1, dtype=np.int8)
        self.env = np.zeros(program.nslots, dtype=np.int32)

    def reset_memo(self):
        self.memo[:] = -1

    cdef int term(self, int t) noexcept nogil:
        cdef int o = self.t_op[t]
        cdef int j, first, cnt
        cdef int64_t idx
        if o == T_VAR:
            return self.env[self.t_arg[t]]
        if o == T_CONST:
            return self.t_arg[t]
        first = self.t_first[t]
        cnt = self.t_count[t]
        idx = 0
        for j in range(cnt):
            idx = idx * self.n + self.term(self.t_kids[first + j])
        return self.ftab[self.f_off[self.t_arg[t]] + idx]

    cdef bint holds(self, int node) noexcept nogil:
        cdef int o = self.op[node]
        cdef int j, first, cnt, slot, body, mid, saved, v
        cdef int64_t idx, key
        cdef bint res, r
        if o == F_EQ:
            return self.term(self.a[node]) == self.term(self.b[node])
        if o == F_REL:
            first = self.c[node]
            cnt = self.d[node]
            idx = 0
            for j in range(cnt):
                idx = idx * self.n + self.term(self.f_kids[first + j])
            return self.rtab[self.r_off[self.a[node]] + idx] != 0
        if o == F_NOT:
            return not self.holds(self.a[node])
        if o == F_AND:
            return self.holds(self.a[node]) and self.holds(self.b[node])
        if o == F_OR:
            return self.holds(self.a[node]) or self.holds(self.b[node])
        if o == F_IMP:
            return (not self.holds(self.a[node])) or self.holds(self.b[node])
        if o == F_IFF:
            return self.holds(self.a[node]) == self.holds(self.b[node])
        if o == F_EX or o == F_ALL:
            mid = self.c[node]
            key = 0
            if mid >= 0:
                first = self.m_first[mid]
                cnt = self.m_count[mid]
                for j in range(cnt):
                    key = key * self.n + self.env[self.m_slots[first + j]]
                key += self.m_off[mid]
                if self.memo[key] >= 0:
                    return self.memo[key] == 1
            slot = self.a[node]
            body = self.b[node]
            saved = self.env[slot]
            res = (o == F_ALL)
            for v in range(self.n):
                self.env[slot] = v
                r = self.holds(body)
                if o == F_EX:
                    if r:
                        res = True
                        break
                elif not r:
                    res = False
                    break
            self.env[slot] = saved
            if mid >= 0:
                self.memo[key] = 1 if res else 0
            return res
        return o == F_TRUE

    def evaluate(self, values):
        """Truth value with the first len(values) slots set to ``values``."""
        cdef int j
        for j in range(len(values)):
            self.env[j] = values[j]
        return bool(self.holds(self.root))

    def grid(self, int k):
        """Truth table over the first ``k`` slots in lexicographic order."""
        cdef int64_t total = 1
        cdef int j
        for j in range(k):
            total *= self.n
        out = np.zeros(total, dtype=np.uint8)
        cdef uint8_t[::1] res = out
        cdef int64_t i
        for j in range(k):
            self.env[j] = 0
        with nogil:
            for i in range(total):
                res[i] = self.holds(self.root)
                j = k - 1
                while j >= 0:
                    self.env[j] += 1
                    if self.env[j] < self.n:
                        break
                    self.env[j] = 0
                    j -= 1
        return out

    def rows(self, int32_t[:, ::1] assignments):
        """Truth value for each row of explicit slot values."""
        cdef int64_t m = assignments.shape[0]
        cdef int k = assignments.shape[1]
        out = np.zeros(m, dtype=np.uint8)
        cdef uint8_t[::1] res = out
        cdef int64_t i
        cdef int j
        with nogil:
            for i in range(m):
                for j in range(k):
                    self.env[j] = assignments[i, j]
                res[i] = self.holds(self.root)
        return out
