"""Two-photon double-slit bench simulator.

Core pieces:

* ``polarization`` -- Jones calculus for one- and two-photon states.
* ``waveoptics``   -- 1-D scalar fields, apertures, Fresnel/Fraunhofer propagation.
* ``biphoton``     -- coincidence/singles rates for entangled pair states.
* ``pilotwave``    -- guided-trajectory sampler over propagated wave stacks.
* ``analysis``     -- fringe visibility and pattern metrics.
* ``bench``        -- scene DSL, compiler, runner; ``cli`` and ``service`` wrap it.
"""

__version__ = "0.1.0"
