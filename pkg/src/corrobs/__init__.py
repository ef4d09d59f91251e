"""Decoupled signal correction and uncertainty observation for systems with
large-error position sensing and an accurate velocity channel, plus a full
quadrotor navigation-and-control simulation and an EKF comparison baseline.
"""

from .estimators import (AxisMeasurement, CorrectorParams, CorrectorState,
                         GeneralCorrectorSpec, GeneralObserverSpec,
                         ObserverParams, ObserverState, corrector_derivative,
                         fractional_corrector_spec, fractional_observer_spec,
                         general_corrector_derivative,
                         general_observer_derivative, observer_derivative,
                         step_corrector, step_observer)
from .fractional import falpha
from .freq import (DescribingFunctionResult, LinearizedSystem,
                   ParamValidationReport, corrector_natural_frequency,
                   describing_function, filtering_advice, linearize_corrector,
                   linearize_observer, observer_natural_frequency,
                   omega_coefficient, validate_corrector_params,
                   validate_observer_params)
from .plant import (UavParams, UavState, UncertaintyModel, WrenchInput,
                    dynamics_derivative, hover_thrust, rotor_forces_to_wrench,
                    sigma, step_plant)
from .sensors import (LargeErrorModel, LargeErrorProcess, MeasurementFrame,
                      NoiseMixture, SensorConfig, SensorSuite, sample_noise)
from .control import (CircleTrajectory, ControlGains, EstimateBundle,
                      HoverTrajectory, TrajectoryPoint, attitude_control,
                      feedforward_terms, position_control, uncertainty_rescale)
from .ekf import EkfConfig, EkfState, ekf_init, ekf_predict, ekf_update
from .engine import (DecouplingReport, ScenarioConfig, SimulationDiverged,
                     SweepResult, TraceLog, TrajectorySpec, convergence_study,
                     decoupling_check, ideal_tracking_errors, metrics,
                     observer_ramp_study, run_scenario, sweep_parameter,
                     tune_ekf_process_noise)
from .config import (ConfigError, bundled_config_path, load_scenario,
                     save_scenario, scenario_from_dict, scenario_to_dict)

__version__ = "0.1.0"
