# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Pauli-frame interpreter for telecorrection rounds.

Each trial keeps four 64-bit masks (X frame, Z frame, X-erasure flags,
Z-erasure flags). Randomness comes from a counter-based hash keyed by
(seed, level, trial, epoch, site) so any partition of the trial range gives
identical results, and so does the NumPy fallback.
"""

from libc.stdint cimport uint8_t, uint64_t, int32_t, int64_t

cdef enum:
    OP_PREP = 0
    OP_H = 1
    OP_CZ = 2
    OP_MEM = 3
    OP_MX = 4
    OP_BEGIN = 5
    OP_VERIFY = 6
    OP_END = 7
    OP_CANON = 8
    OP_DECODE = 9
    OP_OUTPUT = 10

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t mix(uint64_t z) noexcept nogil:
    z = z + GOLDEN
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double unit(uint64_t h) noexcept nogil:
    return <double>(h >> 11) * (1.0 / 9007199254740992.0)


cdef struct Frame:
    uint64_t x
    uint64_t z
    uint64_t fx
    uint64_t fz


cdef inline void noise(Frame* f, uint64_t key, int64_t site, const double* t,
                       uint64_t bit) noexcept nogil:
    cdef double u = unit(mix(key + <uint64_t>site))
    if u < t[3]:
        f.fx |= bit
        f.fz |= bit
        if u < t[0]:
            pass
        elif u < t[1]:
            f.z ^= bit
        elif u < t[2]:
            f.x ^= bit
        else:
            f.x ^= bit
            f.z ^= bit
    elif u < t[4]:
        f.x ^= bit
        f.z ^= bit
    elif u < t[5]:
        f.x ^= bit
    elif u < t[6]:
        f.z ^= bit


cdef inline void inject(Frame* f, int64_t code, uint64_t bit) noexcept nogil:
    if code & 1:
        f.x ^= bit
    if code & 2:
        f.z ^= bit
    if code & 4:
        f.fx |= bit
        f.fz |= bit


cdef inline int gather(uint64_t v, const int32_t[:, ::1] blocks, int b) noexcept nogil:
    cdef int i, e = 0
    for i in range(7):
        e |= <int>((v >> blocks[b, i]) & 1) << i
    return e


cdef inline uint64_t scatter(int e, const int32_t[:, ::1] blocks, int b) noexcept nogil:
    cdef int i
    cdef uint64_t v = 0
    for i in range(7):
        v |= (<uint64_t>((e >> i) & 1)) << blocks[b, i]
    return v


def run_trials(const int32_t[:, ::1] ops, const int32_t[:, ::1] blocks,
               const uint64_t[::1] masks, const double[:, :, ::1] thr,
               const uint8_t[:, ::1] dec, const uint8_t[:, ::1] tie,
               const uint8_t[::1] syn, const uint8_t[::1] par,
               const uint8_t[::1] leader, uint64_t seed, int64_t level,
               int64_t t0, int64_t t1, int64_t max_attempts,
               const int64_t[::1] inj, uint8_t[::1] out):
    """Run trials ``t0 <= t < t1`` and write status bits into ``out``.

    Bit 0 of ``out[t - t0]`` marks a heralded (located) failure, bit 1 a
    logical X error on the output block and bit 2 a logical Z error.
    ``inj`` holds triples ``(op_index, code_slot0, code_slot1)``, each
    adding one fault the first time the location runs; an empty array
    disables fault injection.
    """
    cdef int64_t n_ops = ops.shape[0]
    cdef int64_t t, pc, epoch, attempts, begin_pc
    cdef uint64_t tkey, key, bit, bit2, m, da, db
    cdef int op, a, b, c, online, e, s, em, cr, status, k, rejected
    cdef int n_inj = inj.shape[0] // 3
    cdef uint64_t injected
    cdef Frame f
    cdef const double* row

    with nogil:
        for t in range(t0, t1):
            tkey = mix(mix(mix(seed) ^ <uint64_t>level) ^ <uint64_t>t)
            f.x = 0
            f.z = 0
            f.fx = 0
            f.fz = 0
            epoch = 0
            attempts = 0
            begin_pc = -1
            online = 1
            status = 0
            injected = 0
            key = mix(tkey + <uint64_t>epoch)
            pc = 0
            while pc < n_ops:
                op = ops[pc, 0]
                a = ops[pc, 1]
                b = ops[pc, 2]
                c = ops[pc, 3]
                if op <= OP_MX:
                    row = &thr[online, op, 0]
                    bit = (<uint64_t>1) << a
                    if op == OP_PREP:
                        f.x &= ~bit
                        f.z &= ~bit
                        f.fx &= ~bit
                        f.fz &= ~bit
                    elif op == OP_H:
                        m = (f.x ^ f.z) & bit
                        f.x ^= m
                        f.z ^= m
                        m = (f.fx ^ f.fz) & bit
                        f.fx ^= m
                        f.fz ^= m
                    elif op == OP_CZ:
                        bit2 = (<uint64_t>1) << b
                        da = (f.x >> a) & 1
                        db = (f.x >> b) & 1
                        f.z ^= (da << b) | (db << a)
                        da = (f.fx >> a) & 1
                        db = (f.fx >> b) & 1
                        f.fz |= (da << b) | (db << a)
                    noise(&f, key, 2 * pc, row, bit)
                    if op == OP_CZ:
                        noise(&f, key, 2 * pc + 1, row, bit2)
                    for k in range(n_inj):
                        if pc == inj[3 * k] and not (injected >> k) & 1:
                            injected |= (<uint64_t>1) << k
                            inject(&f, inj[3 * k + 1], bit)
                            if op == OP_CZ:
                                inject(&f, inj[3 * k + 2], bit2)
                elif op == OP_BEGIN:
                    online = 0
                    begin_pc = pc
                    attempts = 0
                elif op == OP_VERIFY:
                    rejected = 0
                    for k in range(b):
                        rejected |= __builtin_popcountll(f.z & masks[a + k]) & 1
                    if rejected:
                        attempts += 1
                        epoch += 1
                        key = mix(tkey + <uint64_t>epoch)
                        if attempts >= max_attempts:
                            status |= 1
                            # abandon the section
                            while ops[pc, 0] != OP_END:
                                pc += 1
                            online = 1
                        else:
                            pc = begin_pc
                elif op == OP_END:
                    online = 1
                elif op == OP_CANON:
                    e = gather(f.x, blocks, a)
                    f.x = (f.x & ~scatter(127, blocks, a)) | scatter(leader[syn[e]], blocks, a)
                elif op == OP_DECODE:
                    e = gather(f.z, blocks, a)
                    em = gather(f.fz, blocks, a)
                    s = syn[e]
                    cr = dec[s, em]
                    if tie[s, em]:
                        status |= 1
                    if par[e ^ cr]:
                        if c == 0:
                            f.x ^= scatter(127, blocks, b)
                        else:
                            f.z ^= scatter(127, blocks, b)
                elif op == OP_OUTPUT:
                    e = gather(f.x, blocks, a)
                    em = gather(f.fx, blocks, a)
                    s = syn[e]
                    cr = dec[s, em]
                    if tie[s, em]:
                        status |= 1
                    if par[e ^ cr]:
                        status |= 2
                    e = gather(f.z, blocks, a)
                    em = gather(f.fz, blocks, a)
                    s = syn[e]
                    cr = dec[s, em]
                    if tie[s, em]:
                        status |= 1
                    if par[e ^ cr]:
                        status |= 4
                pc += 1
            out[t - t0] = <uint8_t>status
