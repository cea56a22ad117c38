/* mapipro section directives for stack_sram */
#pragma DATA_SECTION ( main, .LocalvarsRam)
#pragma DATA_SECTION ( func_1, .LocalvarsRam)
#define MAPIPRO_RAMFUNC_main __attribute__((ramfunc))
#define MAPIPRO_RAMFUNC_func_1 __attribute__((ramfunc))
