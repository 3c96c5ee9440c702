"""NumPy implementation of the Pauli-frame interpreter.

Semantics and random streams match the compiled kernel bit for bit; trials
are processed as vectors instead of one at a time.
"""

from __future__ import annotations

import numpy as np

from bellsim._rng import mix, unit

OP_PREP, OP_H, OP_CZ, OP_MEM, OP_MX = 0, 1, 2, 3, 4
OP_BEGIN, OP_VERIFY, OP_END, OP_CANON, OP_DECODE, OP_OUTPUT = 5, 6, 7, 8, 9, 10

_ONE = np.uint64(1)


def _noise(f, idx, key, site, t, bit):
    u = unit(mix(key[idx] + np.uint64(site)))
    loc = u < t[3]
    sub_z = loc & (u >= t[0]) & (u < t[1])
    sub_x = loc & (u >= t[1]) & (u < t[2])
    sub_y = loc & (u >= t[2])
    y = (~loc & (u < t[4])) | sub_y
    x_only = (~loc & (u >= t[4]) & (u < t[5])) | sub_x
    z_only = (~loc & (u >= t[5]) & (u < t[6])) | sub_z
    b = np.uint64(bit)
    zero = np.uint64(0)
    f["x"][idx] ^= np.where(y | x_only, b, zero)
    f["z"][idx] ^= np.where(y | z_only, b, zero)
    f["fx"][idx] |= np.where(loc, b, zero)
    f["fz"][idx] |= np.where(loc, b, zero)


def _inject(f, idx, code, bit):
    b = np.uint64(bit)
    if code & 1:
        f["x"][idx] ^= b
    if code & 2:
        f["z"][idx] ^= b
    if code & 4:
        f["fx"][idx] |= b
        f["fz"][idx] |= b


def _parity(v):
    v = v.copy()
    p = np.zeros(v.shape, dtype=np.uint64)
    while v.any():
        p ^= v & _ONE
        v >>= _ONE
    return p.astype(bool)


def _gather(v, block):
    e = np.zeros(v.shape, dtype=np.int64)
    for i, q in enumerate(block):
        e |= ((v >> np.uint64(q)) & _ONE).astype(np.int64) << i
    return e


def _scatter(e, block):
    v = np.zeros(np.shape(e), dtype=np.uint64)
    for i, q in enumerate(block):
        v |= ((np.asarray(e, dtype=np.uint64) >> np.uint64(i)) & _ONE) << np.uint64(q)
    return v


def _block_mask(block):
    m = 0
    for q in block:
        m |= 1 << int(q)
    return np.uint64(m)


def run_trials(ops, blocks, masks, thr, dec, tie, syn, par, leader, seed, level,
               t0, t1, max_attempts, inj, out):
    n = int(t1 - t0)
    if n <= 0:
        return
    trials = np.arange(t0, t1, dtype=np.int64).astype(np.uint64)
    base = mix(np.full(1, seed, dtype=np.uint64))
    base = mix(base ^ np.uint64(level & 0xFFFFFFFFFFFFFFFF))
    tkey = mix(base ^ trials)
    f = {k: np.zeros(n, dtype=np.uint64) for k in ("x", "z", "fx", "fz")}
    epoch = np.zeros(n, dtype=np.uint64)
    key = mix(tkey + epoch)
    status = np.zeros(n, dtype=np.uint8)
    injected = np.zeros(n, dtype=np.uint64)
    state = dict(f=f, epoch=epoch, key=key, tkey=tkey, status=status, injected=injected)

    n_ops = len(ops)
    everyone = np.arange(n)
    pc = 0
    while pc < n_ops:
        if ops[pc, 0] == OP_BEGIN:
            end = pc
            while ops[end, 0] != OP_END:
                end += 1
            _run_section(ops, pc, end, blocks, masks, thr, dec, tie, syn, par, leader,
                         max_attempts, inj, state, everyone)
            pc = end + 1
            continue
        _step(ops, pc, 1, blocks, masks, thr, dec, tie, syn, par, leader, inj, state, everyone)
        pc += 1
    out[:n] = status


def _run_section(ops, begin, end, blocks, masks, thr, dec, tie, syn, par, leader,
                 max_attempts, inj, state, idx):
    attempts = np.zeros(len(state["epoch"]), dtype=np.int64)
    todo = idx
    while len(todo):
        live = todo
        retry = []
        for pc in range(begin + 1, end):
            if not len(live):
                break
            if ops[pc, 0] == OP_VERIFY:
                z = state["f"]["z"][live]
                bad = np.zeros(len(live), dtype=bool)
                for m in masks[ops[pc, 1]:ops[pc, 1] + ops[pc, 2]]:
                    bad |= _parity(z & m)
                rej = live[bad]
                live = live[~bad]
                if len(rej):
                    attempts[rej] += 1
                    state["epoch"][rej] += _ONE
                    state["key"][rej] = mix(state["tkey"][rej] + state["epoch"][rej])
                    give_up = attempts[rej] >= max_attempts
                    state["status"][rej[give_up]] |= 1
                    retry.append(rej[~give_up])
                continue
            _step(ops, pc, 0, blocks, masks, thr, dec, tie, syn, par, leader, inj, state, live)
        todo = np.sort(np.concatenate(retry)) if retry else idx[:0]


def _step(ops, pc, online, blocks, masks, thr, dec, tie, syn, par, leader, inj, state, idx):
    op, a, b, c = (int(v) for v in ops[pc])
    f = state["f"]
    if op <= OP_MX:
        t = thr[online, op]
        bit = np.uint64(1 << a)
        if op == OP_PREP:
            for k in f:
                f[k][idx] &= ~bit
        elif op == OP_H:
            for p, q in (("x", "z"), ("fx", "fz")):
                m = (f[p][idx] ^ f[q][idx]) & bit
                f[p][idx] ^= m
                f[q][idx] ^= m
        elif op == OP_CZ:
            ua, ub = np.uint64(a), np.uint64(b)
            xa = (f["x"][idx] >> ua) & _ONE
            xb = (f["x"][idx] >> ub) & _ONE
            f["z"][idx] ^= (xa << ub) | (xb << ua)
            fa = (f["fx"][idx] >> ua) & _ONE
            fb = (f["fx"][idx] >> ub) & _ONE
            f["fz"][idx] |= (fa << ub) | (fb << ua)
        _noise(f, idx, state["key"], 2 * pc, t, bit)
        if op == OP_CZ:
            _noise(f, idx, state["key"], 2 * pc + 1, t, 1 << b)
        for k in range(len(inj) // 3):
            if pc != inj[3 * k]:
                continue
            flag = np.uint64(1 << k)
            hit = idx[(state["injected"][idx] & flag) == 0]
            state["injected"][hit] |= flag
            _inject(f, hit, int(inj[3 * k + 1]), 1 << a)
            if op == OP_CZ:
                _inject(f, hit, int(inj[3 * k + 2]), 1 << b)
    elif op == OP_CANON:
        blk = blocks[a]
        e = _gather(f["x"][idx], blk)
        f["x"][idx] = (f["x"][idx] & ~_block_mask(blk)) | _scatter(leader[syn[e]], blk)
    elif op == OP_DECODE:
        src, tgt = blocks[a], blocks[b]
        e = _gather(f["z"][idx], src)
        em = _gather(f["fz"][idx], src)
        s = syn[e]
        cr = dec[s, em]
        state["status"][idx] |= tie[s, em]
        flip = par[e ^ cr].astype(bool)
        key = "x" if c == 0 else "z"
        f[key][idx[flip]] ^= _block_mask(tgt)
    elif op == OP_OUTPUT:
        blk = blocks[a]
        for frame, flags, bitval in (("x", "fx", 2), ("z", "fz", 4)):
            e = _gather(f[frame][idx], blk)
            em = _gather(f[flags][idx], blk)
            s = syn[e]
            cr = dec[s, em]
            state["status"][idx] |= tie[s, em]
            state["status"][idx] |= (par[e ^ cr] * bitval).astype(np.uint8)
