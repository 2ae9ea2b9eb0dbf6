"""Translation dictionaries for the application"""

from typing import Dict

TRANSLATIONS: Dict[str, Dict[str, str]] = {
    "EN": {
        "app_description": "Competitive rate-maximization games over MIMO/SISO interference channels",
        "help_language": "message language (saved in settings.json)",
        "help_config_dir": "configuration directory (default application/.config)",
        "help_verbose": "debug logging",
        "help_run": "run a game to equilibrium",
        "help_check": "check the sufficient uniqueness conditions",
        "help_psd": "equilibrium power spectral densities of a SISO game",
        "help_beampattern": "transmit beampatterns of the equilibrium covariances",
        "help_sweep": "mean sum rate versus the cross/direct distance ratio",
        "help_scenario": "scenario JSON file",
        "help_seed": "override every seed in the scenario",
        "help_out": "output directory",
        "help_max_iter": "tick limit",
        "help_tol": "relative convergence tolerance",
        "help_workers": "parallel workers",
        "help_xlsx": "also write every table to results.xlsx",
        "help_angles": "angle grid in degrees: start stop count",
        "help_spacing": "array element spacing in wavelengths",
        "help_distances": "distance ratios d_rq/d_qq",
        "help_seeds": "channel realizations per point",
        "help_antennas": "antenna counts",
        "scenario_not_found": "Scenario file not found: {path}",
        "scenario_read_error": "Cannot read scenario {path}: {error}",
        "scenario_not_object": "Scenario must be a JSON object",
        "missing_section": "Missing section: {section}",
        "unknown_key": "Unknown key '{key}' in {where}",
        "expected_object": "{where} must be an object",
        "expected_number": "{where}.{key} must be a {kind}",
        "below_minimum": "{where}.{key} must be at least {minimum}",
        "invalid_array": "{where}: {error}",
        "expected_real": "{where} must be real",
        "unknown_variant": "Unknown game variant {variant!r}; expected one of {choices}",
        "variant_channel_mismatch": "Game {variant} does not match the channel section",
        "invalid_game": "Invalid game: {error}",
        "channel_kind": "channels needs exactly one of: {choices}",
        "invalid_channels": "Invalid channels: {error}",
        "explicit_lists": "{where} needs 'links' and 'noise' lists",
        "missing_key": "{where} needs '{key}'",
        "invalid_antennas": "{where}.antennas must be a positive integer or a list of them",
        "positive_noise": "{where}.noise_power must be positive",
        "invalid_levels": "{where}.bands must map band labels to numbers",
        "unknown_band": "{where}: unknown band {label}",
        "invalid_levels_list": "{where} must be a list of numbers",
        "invalid_band": "{where}.bands[{i}] needs label, start and stop",
        "siso_source": "{where} needs exactly one of 'responses' and 'random'",
        "siso_shape": "{where}.responses must have shape (Q, Q, {bins})",
        "invalid_steering": "{where}.steering_deg must be a list of angles",
        "constraints_list": "constraints must be a non-empty list, one entry per user",
        "constraints_count": "{found} constraint entries for {count} users",
        "masks_need_bands": "{where}.masks by band needs a SISO channel",
        "invalid_gap": "{where}.gap: {error}",
        "invalid_constraints": "{where}: {error}",
        "unknown_schedule": "Unknown schedule kind {kind!r}",
        "invalid_p_update": "schedule.p_update must lie in (0, 1]",
        "unknown_init": "Unknown init preset {init!r}",
        "positive_tol": "run.tol must be positive",
        "parse_failed": "Scenario has errors:",
        "infeasible": "Infeasible: {error}",
        "error": "Error: {error}",
        "save_error": "Could not write {path}: {error}",
        "converged": "Converged after {iterations} ticks",
        "not_converged": "No convergence after {iterations} ticks (max NE residual {residual:.3e})",
        "user_rate": "user {user}: {rate:.6f} bits",
        "sum_rate": "sum rate: {rate:.6f} bits",
        "heuristic_gate": "heuristic gate on the effective channels",
        "condition_received": "low MUI received",
        "condition_generated": "low MUI generated",
        "pass": "PASS",
        "fail": "FAIL",
        "user_margin": "  user {user}: margin {margin:.6g}",
        "unique": "UNIQUE",
        "not_proven": "NOT PROVEN",
        "uniqueness_verdict": "uniqueness: {verdict}",
        "psd_needs_siso": "psd needs a SISO game",
        "beampattern_needs_mimo": "beampattern needs a MIMO game",
        "sweep_needs_random": "sweep-distance needs random MIMO channels",
        "sweep_power_only": "sweep-distance supports power budgets only",
        "sweep_empty": "sweep-distance needs distances and at least one seed",
        "sweep_row": "antennas {antennas} distance {distance:g}: {mean:.6f} +/- {stderr:.6f} bits",
        "sweep_not_converged": "{count} sweep points did not converge",
    },
    "UA": {
        "app_description": "Конкурентні ігри максимізації швидкості в MIMO/SISO каналах з інтерференцією",
        "help_language": "мова повідомлень (зберігається в settings.json)",
        "help_config_dir": "папка конфігурації (за замовчуванням application/.config)",
        "help_verbose": "детальне логування",
        "help_run": "запустити гру до рівноваги",
        "help_check": "перевірити достатні умови єдиності",
        "help_psd": "спектральні густини потужності в рівновазі (SISO)",
        "help_beampattern": "діаграми спрямованості рівноважних коваріацій",
        "help_sweep": "середня сумарна швидкість залежно від відношення відстаней",
        "help_scenario": "JSON файл сценарію",
        "help_seed": "замінити всі seed у сценарії",
        "help_out": "папка для результатів",
        "help_max_iter": "максимальна кількість тактів",
        "help_tol": "відносна точність збіжності",
        "help_workers": "кількість паралельних виконавців",
        "help_xlsx": "також записати всі таблиці у results.xlsx",
        "help_angles": "сітка кутів у градусах: початок кінець кількість",
        "help_spacing": "відстань між елементами решітки в довжинах хвиль",
        "help_distances": "відношення відстаней d_rq/d_qq",
        "help_seeds": "реалізацій каналу на точку",
        "help_antennas": "кількості антен",
        "scenario_not_found": "Файл сценарію не знайдено: {path}",
        "scenario_read_error": "Не вдалося прочитати сценарій {path}: {error}",
        "scenario_not_object": "Сценарій має бути JSON об'єктом",
        "missing_section": "Відсутня секція: {section}",
        "unknown_key": "Невідомий ключ '{key}' у {where}",
        "expected_object": "{where} має бути об'єктом",
        "expected_number": "{where}.{key} має бути числом ({kind})",
        "below_minimum": "{where}.{key} має бути не менше {minimum}",
        "invalid_array": "{where}: {error}",
        "expected_real": "{where} має бути дійсним",
        "unknown_variant": "Невідомий варіант гри {variant!r}; очікується один з {choices}",
        "variant_channel_mismatch": "Гра {variant} не відповідає секції каналів",
        "invalid_game": "Некоректна гра: {error}",
        "channel_kind": "channels має містити рівно одне з: {choices}",
        "invalid_channels": "Некоректні канали: {error}",
        "explicit_lists": "{where} потребує списків 'links' та 'noise'",
        "missing_key": "{where} потребує '{key}'",
        "invalid_antennas": "{where}.antennas має бути додатним цілим або списком таких",
        "positive_noise": "{where}.noise_power має бути додатним",
        "invalid_levels": "{where}.bands має зіставляти мітки смуг з числами",
        "unknown_band": "{where}: невідома смуга {label}",
        "invalid_levels_list": "{where} має бути списком чисел",
        "invalid_band": "{where}.bands[{i}] потребує label, start та stop",
        "siso_source": "{where} потребує рівно одного з 'responses' та 'random'",
        "siso_shape": "{where}.responses має мати форму (Q, Q, {bins})",
        "invalid_steering": "{where}.steering_deg має бути списком кутів",
        "constraints_list": "constraints має бути непорожнім списком, по одному запису на користувача",
        "constraints_count": "{found} записів обмежень для {count} користувачів",
        "masks_need_bands": "{where}.masks за смугами потребує SISO каналу",
        "invalid_gap": "{where}.gap: {error}",
        "invalid_constraints": "{where}: {error}",
        "unknown_schedule": "Невідомий тип розкладу {kind!r}",
        "invalid_p_update": "schedule.p_update має лежати в (0, 1]",
        "unknown_init": "Невідома початкова точка {init!r}",
        "positive_tol": "run.tol має бути додатним",
        "parse_failed": "Сценарій містить помилки:",
        "infeasible": "Недопустимо: {error}",
        "error": "Помилка: {error}",
        "save_error": "Не вдалося записати {path}: {error}",
        "converged": "Збіжність після {iterations} тактів",
        "not_converged": "Немає збіжності після {iterations} тактів (макс. нев'язка NE {residual:.3e})",
        "user_rate": "користувач {user}: {rate:.6f} біт",
        "sum_rate": "сумарна швидкість: {rate:.6f} біт",
        "heuristic_gate": "евристична перевірка на ефективних каналах",
        "condition_received": "низька отримана MUI",
        "condition_generated": "низька створена MUI",
        "pass": "ВИКОНАНО",
        "fail": "НЕ ВИКОНАНО",
        "user_margin": "  користувач {user}: запас {margin:.6g}",
        "unique": "ЄДИНА",
        "not_proven": "НЕ ДОВЕДЕНО",
        "uniqueness_verdict": "єдиність: {verdict}",
        "psd_needs_siso": "psd потребує SISO гри",
        "beampattern_needs_mimo": "beampattern потребує MIMO гри",
        "sweep_needs_random": "sweep-distance потребує випадкових MIMO каналів",
        "sweep_power_only": "sweep-distance підтримує лише обмеження потужності",
        "sweep_empty": "sweep-distance потребує відстаней та хоча б одного seed",
        "sweep_row": "антен {antennas} відстань {distance:g}: {mean:.6f} +/- {stderr:.6f} біт",
        "sweep_not_converged": "{count} точок не зійшлися",
    },
}
