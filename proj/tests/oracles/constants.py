# Reference constants for the unit tests, in 30-digit arithmetic.
import mpmath as mp

mp.mp.dps = 30

print("doubler k at v = 2 v_Fl:", mp.findroot(lambda k: 2 * mp.sin(k) - k, 1.9))

v = (mp.mpf(4) / 3) ** 3  # plateau hopping for b = 3
ks = mp.findroot(lambda k: v * mp.sin(k) - k, 2.0)
print("plateau v:", v, "k*:", ks, "v*:", abs(v * mp.cos(ks) - 1))

print("local outside doubler, mu = 0.5:", 2 * mp.acos(0.5 / mp.sqrt(1.25)))

N = 100
print("ground energy N = 100:", mp.fsum(mp.sin(2 * mp.pi * m / N) for m in range(-N // 2 + 1, 0)))

N = 8
print("G(j, j+1) N = 8:", mp.fsum(mp.exp(1j * 2 * mp.pi * m / N) for m in range(-N // 2 + 1, 0)) / N)

x = 2 * mp.pi * 0.014 / 0.1
print("f(0.014) at kappa 0.1:", 1 / (mp.exp(x) + 1))
print("f at 2 pi omega / kappa = 1:", 1 / (mp.e + 1))
print("kappa, kappa_tilde 0.1, W 600:", 0.1 * mp.tanh(0.1 * mp.pi * 600 / 4))
