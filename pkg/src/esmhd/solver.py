"""Semi-discretization: blended DG/FV right-hand side on a mesh.

``J w du/dt = F_surf + (1 - alpha) F_dg + alpha F_fv - F_visc`` where the
surface terms are shared by both advective operators.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .dg import _gather_faces, dg_viscous_rhs, dg_volume_dir, pair_metrics, scatter_surface_dir, surface_flux_dir
from .fluxes import FluxKind, _entropy_vars_aux, flux_aux
from .fv import ReconstructionKind, fv_interior_dir
from . import kernels
from .mesh import Mesh, from_dir_last, integrate, to_dir_last
from .physics import NVAR, PhysParams, cons_to_prim, entropy, entropy_vars

__all__ = ["SchemeOptions", "SemiDiscretization"]


@dataclass(frozen=True)
class SchemeOptions:
    """Flux and reconstruction choices."""

    volume_flux: str = FluxKind.EC
    surface_flux: str = FluxKind.ES_RUSANOV
    fv_flux: str = FluxKind.TVD_ES
    recon: str = ReconstructionKind.TVD_NO_BOUNDARY

    def __post_init__(self):
        object.__setattr__(self, "volume_flux", FluxKind(self.volume_flux))
        object.__setattr__(self, "surface_flux", FluxKind(self.surface_flux))
        object.__setattr__(self, "fv_flux", FluxKind(self.fv_flux))
        object.__setattr__(self, "recon", ReconstructionKind(self.recon))
        if self.volume_flux == FluxKind.TVD_ES:
            raise ValueError("TVD-ES is only available as FV interior flux")
        if self.surface_flux == FluxKind.TVD_ES:
            raise ValueError("TVD-ES is only available as FV interior flux")


class SemiDiscretization:
    """Residual assembly for a fixed mesh, parameters and scheme.

    Parameters
    ----------
    mesh : Mesh
    params : PhysParams
        ``c_h`` may be changed between calls through :attr:`params`.
    options : SchemeOptions
    boundary_state : callable, optional
        ``boundary_state(x_face, t) -> u`` for non-periodic faces; x_face
        has shape ``(dim, nf[, n])``. Required when the mesh is not fully
        periodic.
    """

    def __init__(self, mesh: Mesh, params: PhysParams, options: SchemeOptions | None = None,
                 boundary_state: Callable | None = None):
        if params.mu0 != 1.0:
            raise ValueError("the discrete operators require mu0 = 1")
        self.mesh = mesh
        self.params = params
        self.options = options or SchemeOptions()
        self.boundary_state = boundary_state
        if not all(mesh.periodic) and boundary_state is None:
            raise ValueError("non-periodic mesh needs a boundary_state function")
        ops = mesh.ops
        dim = mesh.dim
        w = ops.weights
        self.wJ = mesh.J * (w if dim == 1 else np.outer(w, w))
        self.w_other = 1.0 if dim == 1 else w[:, None]
        self.metric_dl = [[to_dir_last(mesh.metrics[a][d], a, dim) for d in range(dim)]
                          for a in range(dim)]
        self.mpair = [pair_metrics(m) for m in self.metric_dl]
        self.face_normal = [[c for c in mesh.face_normals(a)] for a in range(dim)]
        self.face_x = [mesh.face_coordinates(a) for a in range(dim)]
        self.nbrs = mesh.neighbors()
        self.use_kernels = kernels.HAVE_NUMBA
        n = ops.n
        # contiguous line layouts for the compiled kernels
        self.met_lines = [np.ascontiguousarray(np.stack(self.metric_dl[a]).reshape(dim, -1, n))
                          for a in range(dim)]
        wl = np.broadcast_to(np.asarray(self.w_other, dtype=float)[..., 0] if dim > 1 else 1.0,
                             (mesh.K,) + (n,) * (dim - 1))
        self.w_lines = np.ascontiguousarray(wl, dtype=float).reshape(-1)
        self.w_lines_elem = self.w_lines.reshape(mesh.K, -1)
        # whole-element 2D kernels need periodic conforming connectivity
        self.use_kernels_2d = self.use_kernels and dim == 2 and all(mesh.periodic)
        if self.use_kernels_2d:
            self.met_all = np.ascontiguousarray(np.array([[mesh.metrics[a][d] for d in range(2)] for a in range(2)]))
            self.nb_all = np.ascontiguousarray(self.nbrs, dtype=np.int64)
            self.J_all = np.ascontiguousarray(mesh.J)

    # ------------------------------------------------------------------
    def _exterior(self, a, t):
        mesh = self.mesh
        if mesh.periodic[a]:
            return None
        u_ext = self.boundary_state(self.face_x[a], t)
        return u_ext

    def _face_data(self, aux_dl, v_dl, a, t):
        ext = self._exterior(a, t)
        if ext is None:
            auxL, auxR = _gather_faces(aux_dl, self.mesh, a)
            vL, vR = _gather_faces(v_dl, self.mesh, a)
        else:
            aux_e = flux_aux(ext, self.params)
            v_e = _entropy_vars_aux(aux_e, self.params)
            auxL, auxR = _gather_faces(aux_dl, self.mesh, a, aux_e)
            vL, vR = _gather_faces(v_dl, self.mesh, a, v_e)
        return auxL, auxR, vL, vR

    def residual_parts(self, u, t: float = 0.0, fv_elements=None, want_dg: bool = True):
        """Assemble the residual pieces.

        Returns a dict with ``surface``, ``dg`` (volume), ``fv`` (interior,
        only on ``fv_elements``; zeros elsewhere) and ``visc``, each of shape
        ``u.shape``, plus ``aux`` and ``v``.
        """
        mesh, params, opt = self.mesh, self.params, self.options
        dim, ops = mesh.dim, mesh.ops
        prim = cons_to_prim(u, params)
        aux = flux_aux(u, params, prim)
        v = _entropy_vars_aux(aux, params)
        surf = np.zeros_like(u)
        dg = np.zeros_like(u) if want_dg else None
        fv = np.zeros_like(u)
        if fv_elements is None:
            fv_elements = np.arange(mesh.K)
        fv_elements = np.asarray(fv_elements, dtype=np.int64)
        k2d = self.use_kernels_2d
        if k2d:
            kernels.surface_2d(aux, v, self.met_all, self.nb_all, ops.weights,
                               0 if opt.surface_flux == FluxKind.EC else 1, params.gamma, params.c_h, surf)
        for a in range(dim):
            aux_dl = to_dir_last(aux, a, dim)
            if self.use_kernels:
                aux_dl = np.ascontiguousarray(aux_dl)
            v_dl = to_dir_last(v, a, dim)
            if k2d:
                vL = vR = None
            else:
                auxL, auxR, vL, vR = self._face_data(aux_dl, v_dl, a, t)
                GL, GR = surface_flux_dir(auxL, auxR, vL, vR, self.face_normal[a], params, opt.surface_flux)
                s = scatter_surface_dir(GL, GR, mesh, a, self.w_other, v_dl.shape)
                surf += from_dir_last(s, a, dim)
            if want_dg and self.use_kernels and opt.volume_flux == FluxKind.EC:
                d = self._volume_kernel(aux_dl, a)
                dg += from_dir_last(d, a, dim)
            elif want_dg:
                d = dg_volume_dir(aux_dl, v_dl, self.metric_dl[a], self.mpair[a], ops.Q,
                                  self.w_other, params, opt.volume_flux)
                dg += from_dir_last(d, a, dim)
            if fv_elements.size:
                fv += self._fv_dir(aux_dl, v_dl, vL, vR, a, fv_elements, u.shape)
        if not params.viscous:
            visc = np.zeros_like(u)
        elif k2d:
            visc = self._viscous_kernel(v, prim)
        else:
            visc = dg_viscous_rhs(u, v, mesh, params, prim)
        return {"surface": surf, "dg": dg, "fv": fv, "visc": visc, "aux": aux, "v": v, "prim": prim}

    def _viscous_kernel(self, v, prim):
        mesh, params, ops = self.mesh, self.params, self.mesh.ops
        grad = np.empty((2,) + v.shape)
        kernels.br1_gradients_2d(v, self.met_all, self.J_all, self.nb_all, ops.D, ops.weights, grad)
        fvis = np.empty_like(grad)
        kernels.viscous_flux_2d(prim, grad, params.mu_ns, params.eta, params.kappa, params.r_gas, fvis)
        out = np.empty_like(v)
        kernels.viscous_residual_2d(fvis, self.met_all, self.nb_all, ops.Q, ops.weights, out)
        return out

    def _volume_kernel(self, aux_dl, a):
        shape = aux_dl.shape
        n = shape[-1]
        lines = np.ascontiguousarray(aux_dl).reshape(shape[0], -1, n)
        out = np.empty((NVAR,) + lines.shape[1:])
        kernels.volume_ec_lines(lines, self.met_lines[a], self.mesh.ops.Q, self.w_lines,
                                self.mesh.dim, self.params.gamma, self.params.c_h, out)
        return out.reshape((NVAR,) + shape[1:])

    def _fv_dir(self, aux_dl, v_dl, vL, vR, a, elems, shape):
        mesh, opt = self.mesh, self.options
        dim = mesh.dim
        # ghost entropy variables: left neighbour's last node, right neighbour's first node
        if vL is None:
            ghost_l = np.take(v_dl[..., -1], self.nbrs[elems, 2 * a], axis=1)
            ghost_r = np.take(v_dl[..., 0], self.nbrs[elems, 2 * a + 1], axis=1)
        else:
            ghost_l = vL[:, mesh.elem_minus_face[a][elems]]
            ghost_r = vR[:, mesh.elem_plus_face[a][elems]]
        full_set = elems.size == mesh.K
        v_sub = v_dl if full_set else v_dl[:, elems]
        v_pad = np.concatenate([ghost_l[..., None], v_sub, ghost_r[..., None]], axis=-1)
        sub = mesh.subcell[a] if full_set else mesh.subcell[a][:, elems]
        if self.use_kernels:
            res = self._fv_kernel(aux_dl if full_set else aux_dl[:, elems], v_pad, sub, elems)
            if full_set:
                return from_dir_last(res, a, dim)
        else:
            res = fv_interior_dir(aux_dl[:, elems], v_pad, sub, self.w_other, self.params, mesh.ops,
                                  opt.fv_flux, opt.recon)
        full = np.zeros(to_dir_last(np.empty(shape), a, dim).shape)
        full[:, elems] = res
        return from_dir_last(full, a, dim)

    def _fv_kernel(self, aux_e, v_pad, sub, elems):
        mesh, opt, ops = self.mesh, self.options, self.mesh.ops
        n = ops.n
        shape = aux_e.shape
        aux_l = np.ascontiguousarray(aux_e).reshape(shape[0], -1, n)
        v_l = np.ascontiguousarray(v_pad).reshape(NVAR, -1, n + 2)
        sub_l = np.ascontiguousarray(sub).reshape(sub.shape[0], -1, n + 1)
        w_l = self.w_lines if elems.size == mesh.K else np.ascontiguousarray(self.w_lines_elem[elems]).reshape(-1)
        out = np.empty((NVAR,) + aux_l.shape[1:])
        bad = kernels.fv_interior_lines(aux_l, v_l, sub_l, w_l, mesh.dim, self.params.gamma, self.params.c_h,
                                        kernels.FV_CODES[opt.fv_flux.value], kernels.RECON_CODES[opt.recon.value],
                                        ops.nodes, ops.subcell_interfaces, out)
        if bad:
            raise np.linalg.LinAlgError("mean-state entropy Jacobian is not positive definite")
        return out.reshape((NVAR,) + shape[1:])

    def rhs(self, u, alpha=None, t: float = 0.0):
        """Time derivative ``du/dt`` for blending coefficients ``alpha`` (per element)."""
        K = self.mesh.K
        if alpha is None:
            alpha = np.zeros(K)
        alpha = np.asarray(alpha, dtype=float)
        fv_elems = np.nonzero(alpha > 0)[0]
        all_fv = fv_elems.size == K and np.all(alpha == 1.0)
        parts = self.residual_parts(u, t, fv_elems, want_dg=not all_fv)
        a = alpha.reshape((1, -1) + (1,) * self.mesh.dim)
        total = parts["surface"] + a * parts["fv"] - parts["visc"]
        if not all_fv:
            total += (1.0 - a) * parts["dg"]
        return total / self.wJ

    # diagnostics -----------------------------------------------------
    def total_entropy(self, u) -> float:
        return float(integrate(entropy(u, self.params), self.mesh))

    def total_mass(self, u) -> float:
        return float(integrate(u[0], self.mesh))

    def entropy_rate(self, u, alpha=None, t: float = 0.0) -> float:
        """Semi-discrete ``dS/dt = sum_nodes w J v . du/dt``."""
        du = self.rhs(u, alpha, t)
        v = entropy_vars(u, self.params)
        return float(np.sum(self.wJ * np.sum(v * du, axis=0)))

    def divergence_b(self, u):
        """Discrete volume divergence of B (no surface terms), per node."""
        mesh = self.mesh
        dim, D = mesh.dim, mesh.ops.D
        out = np.zeros(mesh.J.shape)
        for a in range(dim):
            flux = sum(mesh.metrics[a][d] * u[5 + d] for d in range(dim))
            fd = to_dir_last(flux, a, dim)
            out += from_dir_last((fd @ D.T), a, dim)
        return out / mesh.J

    def with_ch(self, c_h: float):
        self.params = replace(self.params, c_h=float(c_h))
        return self
